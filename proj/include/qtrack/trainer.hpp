#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtrack/qgnn.hpp"

namespace qtrack {

struct TrainConfig {
  double learning_rate = 0.05;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int n_iterations = 1;  // N_it of the model
  int epochs = 1;
  int n_train = 0;  // subgraphs in the train split
  int n_val = 0;    // subgraphs in the validation split
  int val_every = 25;
  std::uint64_t seed = 1;

  void validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long t = 0;
};

// Standard bias-corrected ADAM over one flat parameter vector. Throws
// NumericError (state and params untouched) on a non-finite gradient.
void adam_step(std::vector<double>& params, std::span<const double> grad,
               AdamState& state, const TrainConfig& config);

// Flat view of ModelParams in declared order: input_w, input_b, qen, qnon.
std::vector<double> flatten_params(const ModelParams& params);
void unflatten_params(std::span<const double> flat, ModelParams& params);
std::vector<double> flatten_grad(const ModelGrad& grad);

// Checkpoint: versioned text header, then all parameter arrays in declared
// order at full precision; optional optimizer state. Bit-exact round trip.
void save_checkpoint(const std::filesystem::path& path,
                     const ModelParams& params,
                     const AdamState* adam = nullptr);
struct Checkpoint {
  ModelParams params;
  std::optional<AdamState> adam;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

// One validation pass: mean loss over subgraphs, AUC pooled over the edges
// of subgraphs that contain both classes.
struct EvalResult {
  double mean_loss = 0.0;
  double auc = 0.0;  // NaN when undefined everywhere
  int single_class_excluded = 0;
  std::vector<double> edge_weights;  // pooled probabilities
};
EvalResult evaluate_subgraphs(const QgnnModel& model, const ModelParams& params,
                              std::span<const SubGraph> dataset);

struct TrainResult {
  ModelParams params;
  AdamState adam;
  double baseline_auc = 0.0;   // step-0 validation AUC
  double final_val_auc = 0.0;
  double final_val_loss = 0.0;
  int steps = 0;
};

// Full training run over a directory of subgraph files: deterministic
// shuffle/split from the seed, one optimizer step per subgraph, periodic
// validation, metrics CSV and final checkpoint written to the given paths.
TrainResult train(const std::filesystem::path& dataset_dir,
                  const TrainConfig& config,
                  const std::filesystem::path& metrics_csv,
                  const std::filesystem::path& checkpoint_path);

// Same, but over an in-memory dataset; paths may be empty to skip writing.
TrainResult train_on(std::vector<SubGraph> dataset, const TrainConfig& config,
                     const std::filesystem::path& metrics_csv,
                     const std::filesystem::path& checkpoint_path);

// Loads every *.qsg file in a directory, sorted by filename.
std::vector<SubGraph> load_dataset(const std::filesystem::path& dir);

}  // namespace qtrack
