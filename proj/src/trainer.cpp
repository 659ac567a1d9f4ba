#include "qtrack/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qtrack/errors.hpp"
#include "qtrack/metrics.hpp"

namespace qtrack {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_array(std::ofstream& f, const std::string& name,
                 std::span<const double> values) {
  f << name << ' ' << values.size();
  for (double v : values) f << ' ' << fmt(v);
  f << '\n';
}

std::vector<double> read_array(std::ifstream& f, const std::string& expect,
                               const std::string& path) {
  std::string name;
  std::size_t n = 0;
  f >> name >> n;
  if (!f || name != expect)
    throw ParseError(path + ": expected array '" + expect + "'");
  std::vector<double> values(n);
  for (auto& v : values) f >> v;
  if (!f) throw ParseError(path + ": truncated array '" + expect + "'");
  return values;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (n_iterations < 1) throw ConfigError("n_iterations must be >= 1");
  if (val_every < 1) throw ConfigError("val_every must be >= 1");
}

void adam_step(std::vector<double>& params, std::span<const double> grad,
               AdamState& state, const TrainConfig& config) {
  if (grad.size() != params.size())
    throw DimensionError("gradient/parameter size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size())
    throw DimensionError("optimizer state size mismatch");
  for (double gv : grad)
    if (!std::isfinite(gv))
      throw NumericError("non-finite gradient, step aborted");

  state.t += 1;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= config.learning_rate * m_hat /
                 (std::sqrt(v_hat) + config.adam_eps);
  }
}

std::vector<double> flatten_params(const ModelParams& params) {
  std::vector<double> flat;
  flat.reserve(params.input_w.size() + params.input_b.size() +
               params.qen.thetas.size() + params.qnon.thetas.size());
  flat.insert(flat.end(), params.input_w.begin(), params.input_w.end());
  flat.insert(flat.end(), params.input_b.begin(), params.input_b.end());
  flat.insert(flat.end(), params.qen.thetas.begin(), params.qen.thetas.end());
  flat.insert(flat.end(), params.qnon.thetas.begin(), params.qnon.thetas.end());
  return flat;
}

void unflatten_params(std::span<const double> flat, ModelParams& params) {
  const std::size_t expect = params.input_w.size() + params.input_b.size() +
                             params.qen.thetas.size() +
                             params.qnon.thetas.size();
  if (flat.size() != expect)
    throw DimensionError("flat parameter vector has wrong size");
  std::size_t o = 0;
  for (auto& v : params.input_w) v = flat[o++];
  for (auto& v : params.input_b) v = flat[o++];
  for (auto& v : params.qen.thetas) v = flat[o++];
  for (auto& v : params.qnon.thetas) v = flat[o++];
}

std::vector<double> flatten_grad(const ModelGrad& grad) {
  std::vector<double> flat;
  flat.insert(flat.end(), grad.input_w.begin(), grad.input_w.end());
  flat.insert(flat.end(), grad.input_b.begin(), grad.input_b.end());
  flat.insert(flat.end(), grad.qen.begin(), grad.qen.end());
  flat.insert(flat.end(), grad.qnon.begin(), grad.qnon.end());
  return flat;
}

void save_checkpoint(const std::filesystem::path& path,
                     const ModelParams& params, const AdamState* adam) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "qgnn-checkpoint 1\n";
  f << "d_hid " << params.d_hid << '\n';
  f << "n_iterations " << params.n_iterations << '\n';
  write_array(f, "input_w", params.input_w);
  write_array(f, "input_b", params.input_b);
  write_array(f, "qen", params.qen.thetas);
  write_array(f, "qnon", params.qnon.thetas);
  if (adam) {
    f << "adam_t " << adam->t << '\n';
    write_array(f, "adam_m", adam->m);
    write_array(f, "adam_v", adam->v);
  }
  if (!f.good()) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path.string());
  const std::string p = path.string();
  std::string magic, key;
  int version = 0;
  f >> magic >> version;
  if (!f || magic != "qgnn-checkpoint" || version != 1)
    throw ParseError(p + ": not a version-1 checkpoint");
  Checkpoint ckpt;
  f >> key >> ckpt.params.d_hid;
  if (!f || key != "d_hid") throw ParseError(p + ": missing d_hid");
  f >> key >> ckpt.params.n_iterations;
  if (!f || key != "n_iterations") throw ParseError(p + ": missing n_iterations");
  ckpt.params.input_w = read_array(f, "input_w", p);
  ckpt.params.input_b = read_array(f, "input_b", p);
  ckpt.params.qen.thetas = read_array(f, "qen", p);
  ckpt.params.qnon.thetas = read_array(f, "qnon", p);
  ckpt.params.validate();
  if (f >> key) {
    if (key != "adam_t") throw ParseError(p + ": unexpected trailer '" + key + "'");
    AdamState adam;
    f >> adam.t;
    adam.m = read_array(f, "adam_m", p);
    adam.v = read_array(f, "adam_v", p);
    ckpt.adam = std::move(adam);
  }
  return ckpt;
}

EvalResult evaluate_subgraphs(const QgnnModel& model, const ModelParams& params,
                              std::span<const SubGraph> dataset) {
  EvalResult res;
  std::vector<double> pooled_probs;
  std::vector<int> pooled_labels;
  double loss_sum = 0.0;
  int loss_count = 0;
  for (const auto& sg : dataset) {
    if (sg.num_edges() == 0) continue;
    const auto probs = model.forward(sg, params);
    const ClassWeights cw = balanced_weights(sg.labels);
    loss_sum += weighted_bce(probs, sg.labels, cw);
    ++loss_count;
    res.edge_weights.insert(res.edge_weights.end(), probs.begin(), probs.end());
    const int n_pos = std::accumulate(sg.labels.begin(), sg.labels.end(), 0);
    if (n_pos == 0 || n_pos == static_cast<int>(sg.labels.size())) {
      ++res.single_class_excluded;
      continue;
    }
    pooled_probs.insert(pooled_probs.end(), probs.begin(), probs.end());
    pooled_labels.insert(pooled_labels.end(), sg.labels.begin(), sg.labels.end());
  }
  res.mean_loss = loss_count ? loss_sum / loss_count : 0.0;
  res.auc = pooled_probs.empty()
                ? std::numeric_limits<double>::quiet_NaN()
                : roc_auc(pooled_probs, pooled_labels);
  return res;
}

std::vector<SubGraph> load_dataset(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".qsg") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<SubGraph> dataset;
  dataset.reserve(files.size());
  for (const auto& f : files) dataset.push_back(load_subgraph(f));
  return dataset;
}

TrainResult train_on(std::vector<SubGraph> dataset, const TrainConfig& config,
                     const std::filesystem::path& metrics_csv,
                     const std::filesystem::path& checkpoint_path) {
  config.validate();
  if (dataset.size() < 2)
    throw std::domain_error("training needs at least 2 subgraphs");

  int n_train = config.n_train;
  int n_val = config.n_val;
  if (n_train == 0 && n_val == 0) {
    n_train = static_cast<int>(dataset.size() * 4 / 5);
    n_val = static_cast<int>(dataset.size()) - n_train;
  }
  if (n_train < 1 || n_val < 1 ||
      n_train + n_val > static_cast<int>(dataset.size()))
    throw std::domain_error("split counts inconsistent with dataset size (" +
                            std::to_string(dataset.size()) + " subgraphs)");

  std::mt19937_64 rng(config.seed);
  std::shuffle(dataset.begin(), dataset.end(), rng);
  std::vector<SubGraph> train_set(dataset.begin(), dataset.begin() + n_train);
  std::vector<SubGraph> val_set(dataset.begin() + n_train,
                                dataset.begin() + n_train + n_val);

  const QgnnModel model;
  TrainResult result;
  result.params = random_model(config.n_iterations, config.seed);

  std::ofstream csv;
  if (!metrics_csv.empty()) {
    csv.open(metrics_csv);
    if (!csv) throw std::runtime_error("cannot write " + metrics_csv.string());
    csv << "step,subgraph_id,train_loss,val_loss,val_auc\n";
  }

  auto provenance = [](const SubGraph& sg) {
    std::ostringstream os;
    os << "e" << sg.event_id << "_p" << sg.phi_sector << "_z" << sg.z_sector;
    return os.str();
  };
  auto validate_now = [&](int step, const std::string& sg_id,
                          const std::string& train_loss_cell) {
    const EvalResult ev = evaluate_subgraphs(model, result.params, val_set);
    if (csv.is_open())
      csv << step << ',' << sg_id << ',' << train_loss_cell << ','
          << fmt(ev.mean_loss) << ',' << fmt(ev.auc) << '\n';
    return ev;
  };

  const EvalResult baseline = validate_now(0, "", "");
  result.baseline_auc = baseline.auc;
  result.final_val_auc = baseline.auc;
  result.final_val_loss = baseline.mean_loss;

  ModelParams last_good = result.params;
  AdamState last_good_adam = result.adam;
  int step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sg : train_set) {
      if (sg.num_edges() == 0) continue;
      ++step;
      QgnnModel::LossAndGrad lg;
      try {
        lg = model.loss_gradient(sg, result.params, sg.labels);
        auto flat = flatten_params(result.params);
        adam_step(flat, flatten_grad(lg.grad), result.adam, config);
        unflatten_params(flat, result.params);
      } catch (const NumericError&) {
        // keep the last finite state on disk, then give up
        if (!checkpoint_path.empty())
          save_checkpoint(checkpoint_path, last_good, &last_good_adam);
        throw;
      }
      last_good = result.params;
      last_good_adam = result.adam;
      if (step % config.val_every == 0) {
        const EvalResult ev = validate_now(step, provenance(sg), fmt(lg.loss));
        result.final_val_auc = ev.auc;
        result.final_val_loss = ev.mean_loss;
      } else if (csv.is_open()) {
        csv << step << ',' << provenance(sg) << ',' << fmt(lg.loss) << ",,\n";
      }
    }
  }
  if (step > 0 && step % config.val_every != 0) {
    const EvalResult ev = validate_now(step, "", "");
    result.final_val_auc = ev.auc;
    result.final_val_loss = ev.mean_loss;
  }
  result.steps = step;

  if (!checkpoint_path.empty())
    save_checkpoint(checkpoint_path, result.params, &result.adam);
  if (csv.is_open() && !csv.good())
    throw std::runtime_error("write failed: " + metrics_csv.string());
  return result;
}

TrainResult train(const std::filesystem::path& dataset_dir,
                  const TrainConfig& config,
                  const std::filesystem::path& metrics_csv,
                  const std::filesystem::path& checkpoint_path) {
  auto dataset = load_dataset(dataset_dir);
  if (dataset.empty())
    throw std::domain_error("no subgraph files in " + dataset_dir.string());
  return train_on(std::move(dataset), config, metrics_csv, checkpoint_path);
}

}  // namespace qtrack
