// qtrack: synthetic event generation, graph building, QGNN training and
// evaluation, gradient checking, and SVG plots, in one executable.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qtrack/autodiff.hpp"
#include "qtrack/config.hpp"
#include "qtrack/errors.hpp"
#include "qtrack/graph_builder.hpp"
#include "qtrack/hitdata.hpp"
#include "qtrack/metrics.hpp"
#include "qtrack/parallel.hpp"
#include "qtrack/plot.hpp"
#include "qtrack/qgnn.hpp"
#include "qtrack/trainer.hpp"

namespace fs = std::filesystem;
using namespace qtrack;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::string event_stem(long long event_id) {
  std::ostringstream os;
  os << "event" << std::setw(6) << std::setfill('0') << event_id;
  return os.str();
}

std::string subgraph_name(long long event_id, int phi_sector, int z_sector) {
  std::ostringstream os;
  os << event_stem(event_id) << "_p" << phi_sector << "_z" << z_sector
     << ".qsg";
  return os.str();
}

int run_gen(const RunConfig& config, const std::string& out_dir) {
  fs::create_directories(out_dir);
  for (int e = 0; e < config.events; ++e) {
    const Event event = generate_event(config.gen, e, config.train.seed);
    const std::string stem = event_stem(e);
    write_event(event, fs::path(out_dir) / (stem + "_hits.csv"),
                fs::path(out_dir) / (stem + "_particles.csv"));
  }
  std::cout << "wrote " << config.events << " event(s) to " << out_dir << "\n";
  return 0;
}

int run_build(const RunConfig& config, const std::string& in_dir,
              const std::string& out_dir, bool cuts_from_file) {
  fs::create_directories(out_dir);
  std::vector<fs::path> hit_files;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with("_hits.csv")) hit_files.push_back(entry.path());
  }
  std::sort(hit_files.begin(), hit_files.end());
  if (hit_files.empty())
    throw ParseError("no *_hits.csv files in " + in_dir);

  if (!cuts_from_file)
    std::cout << "no cuts file given, using defaults: pt_min="
              << config.cuts.pt_min
              << " phi_slope_max=" << config.cuts.phi_slope_max
              << " z0_max=" << config.cuts.z0_max << " eta=["
              << config.cuts.eta_min << "," << config.cuts.eta_max << "]\n";

  std::size_t truth_segments = 0, kept_true = 0, kept_total = 0, files = 0;
  EdgeBuildStats stats;
  for (const auto& hits_path : hit_files) {
    std::string pp = hits_path.string();
    pp.replace(pp.size() - std::string("_hits.csv").size(), std::string::npos,
               "_particles.csv");
    Event event = load_event(hits_path, pp);
    // recover the event id from the eventNNNNNN_hits.csv naming scheme
    const std::string stem = hits_path.filename().string();
    if (stem.starts_with("event")) {
      const std::size_t digits = stem.find('_', 5);
      if (digits != std::string::npos)
        event.event_id = std::stoll(stem.substr(5, digits - 5));
    }
    const Event cut = apply_truth_cuts(event, config.cuts);
    const auto sectors = split_sectors(cut);
    for (int s = 0; s < 16; ++s) {
      SubGraph sg = build_edges(sectors[s], config.cuts, s / 2, s % 2, &stats);
      label_edges(sg, sectors[s]);
      sg.validate();
      save_subgraph(sg, fs::path(out_dir) / subgraph_name(event.event_id,
                                                          s / 2, s % 2));
      ++files;
      kept_total += sg.num_edges();
      kept_true += std::accumulate(sg.labels.begin(), sg.labels.end(),
                                   std::size_t{0});
      // truth-consecutive segments in this sector, the efficiency denominator
      std::map<long long, std::vector<double>> radii;
      for (const auto& h : sectors[s].hits)
        if (h.particle_id != 0) radii[h.particle_id].push_back(h.r());
      for (auto& [pid, rs] : radii)
        if (rs.size() >= 2) truth_segments += rs.size() - 1;
    }
  }
  const double efficiency =
      truth_segments ? static_cast<double>(kept_true) / truth_segments : 0.0;
  const double purity =
      kept_total ? static_cast<double>(kept_true) / kept_total : 0.0;
  std::cout << "wrote " << files << " subgraph files to " << out_dir << "\n"
            << "truth segments: " << truth_segments
            << "  kept edges: " << kept_total << " (" << kept_true
            << " true)\n"
            << "efficiency: " << efficiency << "  purity: " << purity
            << "  zero-dr skipped: " << stats.zero_dr_skipped << "\n";
  return 0;
}

int run_train(const RunConfig& config, const std::string& data_dir,
              const std::string& metrics_path, const std::string& ckpt_path) {
  const TrainResult result =
      train(data_dir, config.train, metrics_path, ckpt_path);
  std::cout << "steps: " << result.steps
            << "  baseline AUC: " << result.baseline_auc
            << "  final val loss: " << result.final_val_loss
            << "  final val AUC: " << result.final_val_auc << "\n"
            << "metrics: " << metrics_path << "\ncheckpoint: " << ckpt_path
            << "\n";
  return 0;
}

int run_eval(const std::string& ckpt_path, const std::string& data_dir,
             const std::string& histogram_path) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const auto dataset = load_dataset(data_dir);
  if (dataset.empty()) throw ParseError("no subgraph files in " + data_dir);
  const QgnnModel model;
  const EvalResult res = evaluate_subgraphs(model, ckpt.params, dataset);
  std::cout << "subgraphs: " << dataset.size()
            << "  mean loss: " << res.mean_loss << "  AUC: " << res.auc
            << "  single-class excluded: " << res.single_class_excluded
            << "\n";
  if (!histogram_path.empty()) {
    write_histogram_svg(histogram_path, "Edge weights", res.edge_weights);
    std::cout << "histogram: " << histogram_path << "\n";
  }
  return 0;
}

int run_gradcheck(const RunConfig& config, double tolerance) {
  GeneratorConfig gen = config.gen;
  gen.n_tracks = 4;
  gen.noise_fraction = 0.0;
  const Event event = generate_event(gen, 0, config.train.seed);
  SelectionCuts cuts = config.cuts;
  const auto graphs = build_event_graphs(event, cuts);
  const SubGraph* pick = nullptr;
  for (const auto& g : graphs)
    if (g.num_edges() > 0 && (!pick || g.num_edges() > pick->num_edges()))
      pick = &g;
  if (!pick) throw std::domain_error("toy event produced no edges; try another seed");

  const QgnnModel model;
  ModelParams params = random_model(config.train.n_iterations, config.train.seed);
  const auto analytic =
      flatten_grad(model.loss_gradient(*pick, params, pick->labels).grad);

  ModelParams probe = params;
  auto loss_at = [&](std::span<const double> flat) {
    unflatten_params(flat, probe);
    const auto probs = model.forward(*pick, probe);
    return weighted_bce(probs, pick->labels, balanced_weights(pick->labels));
  };
  const auto flat = flatten_params(params);
  const auto fd = finite_diff_oracle(loss_at, flat, 1e-4);

  double max_dev = 0.0;
  for (std::size_t i = 0; i < fd.size(); ++i)
    max_dev = std::max(max_dev, std::abs(fd[i] - analytic[i]));
  std::cout << "graph: " << pick->num_nodes() << " nodes, "
            << pick->num_edges() << " edges, N_it=" << config.train.n_iterations
            << "\nmax |shift - finite difference| = " << max_dev
            << " (tolerance " << tolerance << ")\n";
  if (!(max_dev < tolerance)) {
    std::cerr << "gradient check FAILED\n";
    return kExitNumeric;
  }
  return 0;
}

int run_plot(const std::string& metrics_path, const std::string& subgraph_dir,
             const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (!metrics_path.empty()) {
    std::ifstream f(metrics_path);
    if (!f) throw ParseError("cannot open " + metrics_path);
    std::string line;
    if (!std::getline(f, line) ||
        line != "step,subgraph_id,train_loss,val_loss,val_auc")
      throw ParseError(metrics_path + ": unexpected metrics header");
    Series train_loss{"train loss", {}}, val_loss{"val loss", {}},
        val_auc{"val AUC", {}};
    while (std::getline(f, line)) {
      std::stringstream ss(line);
      std::string step, sg, tl, vl, va;
      std::getline(ss, step, ',');
      std::getline(ss, sg, ',');
      std::getline(ss, tl, ',');
      std::getline(ss, vl, ',');
      std::getline(ss, va, ',');
      const double x = std::stod(step);
      if (!tl.empty()) train_loss.points.emplace_back(x, std::stod(tl));
      if (!vl.empty()) val_loss.points.emplace_back(x, std::stod(vl));
      if (!va.empty() && va != "nan" && va != "-nan")
        val_auc.points.emplace_back(x, std::stod(va));
    }
    const Series loss_series[] = {train_loss, val_loss};
    write_line_chart_svg(fs::path(out_dir) / "loss.svg", "Training loss",
                         "step", "loss", loss_series);
    const Series auc_series[] = {val_auc};
    write_line_chart_svg(fs::path(out_dir) / "auc.svg", "Validation AUC",
                         "step", "AUC", auc_series);
    std::cout << "wrote " << (fs::path(out_dir) / "loss.svg").string()
              << " and " << (fs::path(out_dir) / "auc.svg").string() << "\n";
  }
  if (!subgraph_dir.empty()) {
    const auto dataset = load_dataset(subgraph_dir);
    if (dataset.empty())
      throw ParseError("no subgraph files in " + subgraph_dir);
    std::vector<double> rs, phis, zs;
    for (const auto& sg : dataset)
      for (const auto& n : sg.node_features) {
        rs.push_back(n[0]);
        phis.push_back(n[1]);
        zs.push_back(n[2]);
      }
    write_histogram_svg(fs::path(out_dir) / "hist_r.svg", "Hit r'", rs);
    write_histogram_svg(fs::path(out_dir) / "hist_phi.svg", "Hit phi'", phis);
    write_histogram_svg(fs::path(out_dir) / "hist_z.svg", "Hit z'", zs);
    std::cout << "wrote r/phi/z histograms to " << out_dir << "\n";
  }
  if (metrics_path.empty() && subgraph_dir.empty())
    throw ConfigError("plot needs --metrics and/or --subgraphs");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum graph neural network track segment classifier"};
  app.require_subcommand(1);

  std::string config_path, in_dir, out_dir = ".", data_dir, metrics_path,
              ckpt_path, cuts_path, histogram_path, subgraph_dir;
  double tolerance = 1e-4;
  RunConfig config;

  // flags write into `flags`; only values the user actually passed are
  // copied over the config-file values after parsing
  RunConfig flags;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--threads", flags.threads, "max worker threads");
    cmd->add_option("--seed", flags.train.seed, "random seed");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate synthetic events");
  add_common(gen);
  gen->add_option("--events", flags.events, "number of events");
  gen->add_option("--tracks", flags.gen.n_tracks, "tracks per event");
  gen->add_option("--noise", flags.gen.noise_fraction,
                  "noise hit fraction, in [0,1)");
  gen->add_option("--pt-min", flags.gen.pt_min, "min track pt, GeV");
  gen->add_option("--pt-max", flags.gen.pt_max, "max track pt, GeV");
  gen->add_option("--out", out_dir, "output directory")->required();

  CLI::App* build = app.add_subcommand("build", "build sector subgraphs");
  add_common(build);
  build->add_option("--in", in_dir, "event directory")->required();
  build->add_option("--out", out_dir, "subgraph output directory")->required();
  build->add_option("--cuts", cuts_path, "selection cuts config file");

  CLI::App* train_cmd = app.add_subcommand("train", "train the model");
  add_common(train_cmd);
  train_cmd->add_option("--data", data_dir, "subgraph directory")->required();
  train_cmd->add_option("--nit", flags.train.n_iterations,
                        "message-passing iterations");
  train_cmd->add_option("--epochs", flags.train.epochs, "training epochs");
  train_cmd->add_option("--lr", flags.train.learning_rate, "learning rate");
  train_cmd->add_option("--n-train", flags.train.n_train, "train split size");
  train_cmd->add_option("--n-val", flags.train.n_val, "validation split size");
  train_cmd->add_option("--val-every", flags.train.val_every,
                        "validation cadence in steps");
  train_cmd->add_option("--metrics", metrics_path, "metrics CSV output")
      ->required();
  train_cmd->add_option("--checkpoint", ckpt_path, "checkpoint output")
      ->required();

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file")
      ->required();
  eval_cmd->add_option("--data", data_dir, "subgraph directory")->required();
  eval_cmd->add_option("--histogram", histogram_path,
                       "edge-weight histogram SVG output");

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "parameter-shift vs finite differences");
  add_common(gradcheck);
  gradcheck->add_option("--nit", flags.train.n_iterations,
                        "message-passing iterations");
  gradcheck->add_option("--tolerance", tolerance, "max allowed deviation");

  CLI::App* plot = app.add_subcommand("plot", "emit SVG charts");
  add_common(plot);
  plot->add_option("--metrics", metrics_path, "metrics CSV to chart");
  plot->add_option("--subgraphs", subgraph_dir,
                   "subgraph directory for r/phi/z histograms");
  plot->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);
  CLI::App* cmd = app.get_subcommands().front();

  try {
    if (!config_path.empty()) config = load_run_config(config_path);
    if (!cuts_path.empty()) {
      const RunConfig cuts_cfg = load_run_config(cuts_path);
      config.cuts = cuts_cfg.cuts;
    }
    // flag overrides
    auto passed = [&](const std::string& name) {
      return cmd->count(name) > 0;
    };
    if (passed("--threads")) config.threads = flags.threads;
    if (passed("--seed")) config.train.seed = flags.train.seed;
    if (cmd == gen) {
      if (passed("--events")) config.events = flags.events;
      if (passed("--tracks")) config.gen.n_tracks = flags.gen.n_tracks;
      if (passed("--noise")) config.gen.noise_fraction = flags.gen.noise_fraction;
      if (passed("--pt-min")) config.gen.pt_min = flags.gen.pt_min;
      if (passed("--pt-max")) config.gen.pt_max = flags.gen.pt_max;
    }
    if (cmd == train_cmd || cmd == gradcheck) {
      if (passed("--nit")) config.train.n_iterations = flags.train.n_iterations;
    }
    if (cmd == train_cmd) {
      if (passed("--epochs")) config.train.epochs = flags.train.epochs;
      if (passed("--lr")) config.train.learning_rate = flags.train.learning_rate;
      if (passed("--n-train")) config.train.n_train = flags.train.n_train;
      if (passed("--n-val")) config.train.n_val = flags.train.n_val;
      if (passed("--val-every")) config.train.val_every = flags.train.val_every;
    }
    if (config.threads > 0) set_max_threads(config.threads);

    if (cmd == gen) return run_gen(config, out_dir);
    if (cmd == build) return run_build(config, in_dir, out_dir, !cuts_path.empty());
    if (cmd == train_cmd) return run_train(config, data_dir, metrics_path, ckpt_path);
    if (cmd == eval_cmd) return run_eval(ckpt_path, data_dir, histogram_path);
    if (cmd == gradcheck) return run_gradcheck(config, tolerance);
    if (cmd == plot) return run_plot(metrics_path, subgraph_dir, out_dir);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
