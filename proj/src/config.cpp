#include "qtrack/config.hpp"

#include <fstream>
#include <sstream>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad numeric value '" + value +
                      "'");
  }
}

long long to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer value '" + value +
                      "'");
  }
}

}  // namespace

void apply_config_entry(RunConfig& c, const std::string& key,
                        const std::string& value) {
  // training
  if (key == "learning_rate") c.train.learning_rate = to_double(key, value);
  else if (key == "adam_beta1") c.train.adam_beta1 = to_double(key, value);
  else if (key == "adam_beta2") c.train.adam_beta2 = to_double(key, value);
  else if (key == "adam_eps") c.train.adam_eps = to_double(key, value);
  else if (key == "n_iterations") c.train.n_iterations = static_cast<int>(to_int(key, value));
  else if (key == "epochs") c.train.epochs = static_cast<int>(to_int(key, value));
  else if (key == "n_train") c.train.n_train = static_cast<int>(to_int(key, value));
  else if (key == "n_val") c.train.n_val = static_cast<int>(to_int(key, value));
  else if (key == "val_every") c.train.val_every = static_cast<int>(to_int(key, value));
  else if (key == "seed") c.train.seed = static_cast<std::uint64_t>(to_int(key, value));
  // selection cuts
  else if (key == "pt_min") c.cuts.pt_min = to_double(key, value);
  else if (key == "phi_slope_max") c.cuts.phi_slope_max = to_double(key, value);
  else if (key == "z0_max") c.cuts.z0_max = to_double(key, value);
  else if (key == "eta_min") c.cuts.eta_min = to_double(key, value);
  else if (key == "eta_max") c.cuts.eta_max = to_double(key, value);
  // generator
  else if (key == "tracks") c.gen.n_tracks = static_cast<int>(to_int(key, value));
  else if (key == "gen_pt_min") c.gen.pt_min = to_double(key, value);
  else if (key == "gen_pt_max") c.gen.pt_max = to_double(key, value);
  else if (key == "noise") c.gen.noise_fraction = to_double(key, value);
  else if (key == "gen_eta_max") c.gen.eta_max = to_double(key, value);
  else if (key == "vz_sigma") c.gen.vz_sigma_mm = to_double(key, value);
  else if (key == "smear") c.gen.smear_mm = to_double(key, value);
  else if (key == "b_field") c.gen.b_field_tesla = to_double(key, value);
  // run
  else if (key == "events") c.events = static_cast<int>(to_int(key, value));
  else if (key == "threads") c.threads = static_cast<int>(to_int(key, value));
  else
    throw ConfigError("unknown config key '" + key + "'");
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    apply_config_entry(config, trim(line.substr(0, eq)),
                       trim(line.substr(eq + 1)));
  }
  return config;
}

}  // namespace qtrack
