#pragma once

#include <filesystem>
#include <string>

#include "qtrack/graph_builder.hpp"
#include "qtrack/hitdata.hpp"
#include "qtrack/trainer.hpp"

namespace qtrack {

// Everything the CLI can steer, sourced from a `key = value` config file
// and overridden by command-line flags.
struct RunConfig {
  TrainConfig train;
  SelectionCuts cuts;
  GeneratorConfig gen;
  int events = 1;
  int threads = 0;  // 0 = machine parallelism
};

// Applies one key/value pair; throws ConfigError naming any unknown key or
// unparseable value.
void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value);

// `key = value` lines, '#' starts a comment, blank lines ignored.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace qtrack
