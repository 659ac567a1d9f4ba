#include "qtrack/graph_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSectorWidth = kPi / 4.0;

// Wrap an angle difference into (-pi, pi].
double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void SubGraph::validate() const {
  if (phi_sector < 0 || phi_sector > 7 || z_sector < 0 || z_sector > 1)
    throw std::domain_error("subgraph sector indices out of range");
  for (const auto& f : node_features)
    for (double v : f)
      if (!(v >= 0.0 && v <= 1.0))
        throw std::domain_error("node feature outside [0,1]");
  if (!labels.empty() && labels.size() != edges.size())
    throw DimensionError("labels length != edges length");
  std::set<std::pair<int, int>> seen;
  for (const auto& [in, out] : edges) {
    if (in < 0 || out < 0 || in >= static_cast<int>(node_features.size()) ||
        out >= static_cast<int>(node_features.size()))
      throw std::out_of_range("edge endpoint index out of range");
    if (!(node_features[in][0] < node_features[out][0]))
      throw std::domain_error("edge must point from smaller r to larger r");
    if (!seen.insert({in, out}).second)
      throw std::domain_error("duplicate edge");
  }
  for (int l : labels)
    if (l != 0 && l != 1) throw std::domain_error("label must be 0 or 1");
}

Event apply_truth_cuts(const Event& event, const SelectionCuts& cuts) {
  std::unordered_map<long long, const ParticleTruth*> by_id;
  for (const auto& p : event.particles) by_id[p.particle_id] = &p;

  auto passes = [&](long long pid) {
    if (pid == 0) return false;  // noise dropped here
    auto it = by_id.find(pid);
    if (it == by_id.end()) return false;
    const ParticleTruth& p = *it->second;
    return p.pt >= cuts.pt_min && p.eta >= cuts.eta_min &&
           p.eta <= cuts.eta_max;
  };

  Event out;
  out.event_id = event.event_id;
  for (const auto& h : event.hits)
    if (passes(h.particle_id)) out.hits.push_back(h);
  for (const auto& p : event.particles)
    if (passes(p.particle_id)) out.particles.push_back(p);
  return out;
}

std::array<Event, 16> split_sectors(const Event& event) {
  std::array<Event, 16> sectors;
  for (auto& s : sectors) {
    s.event_id = event.event_id;
    s.particles = event.particles;
  }
  for (const auto& h : event.hits) {
    const double phi = h.phi();
    int phi_bin = static_cast<int>(std::floor((phi + kPi) / kSectorWidth));
    phi_bin = ((phi_bin % 8) + 8) % 8;  // phi == pi lands in bin 0
    const int z_bin = h.z < 0.0 ? 0 : 1;
    sectors[phi_bin * 2 + z_bin].hits.push_back(h);
  }
  return sectors;
}

SubGraph build_edges(const Event& sector_event, const SelectionCuts& cuts,
                     int phi_sector, int z_sector, EdgeBuildStats* stats,
                     const FeatureScales& scales) {
  SubGraph graph;
  graph.event_id = sector_event.event_id;
  graph.phi_sector = phi_sector;
  graph.z_sector = z_sector;

  const double sector_low = -kPi + phi_sector * kSectorWidth;
  graph.node_features.reserve(sector_event.hits.size());
  for (const auto& h : sector_event.hits) {
    const double rel_phi = wrap_angle(h.phi() - sector_low);
    graph.node_features.push_back({clamp01(h.r() / scales.r_max),
                                   clamp01(rel_phi / kSectorWidth),
                                   clamp01((h.z + scales.z_abs_max) /
                                           (2.0 * scales.z_abs_max))});
  }

  std::map<int, std::vector<int>> by_layer;
  for (std::size_t i = 0; i < sector_event.hits.size(); ++i)
    by_layer[sector_event.hits[i].layer].push_back(static_cast<int>(i));

  for (const auto& [layer, lower] : by_layer) {
    auto it = by_layer.find(layer + 1);
    if (it == by_layer.end()) continue;
    for (int a : lower) {
      for (int b : it->second) {
        const Hit& ha = sector_event.hits[a];
        const Hit& hb = sector_event.hits[b];
        if (stats) ++stats->candidate_pairs;
        const double dr = hb.r() - ha.r();
        if (dr == 0.0) {
          if (stats) ++stats->zero_dr_skipped;
          continue;
        }
        const double dphi = wrap_angle(hb.phi() - ha.phi());
        const double phi_slope = dphi / dr;
        const double z0 = ha.z - ha.r() * (hb.z - ha.z) / dr;
        if (std::abs(phi_slope) >= cuts.phi_slope_max) continue;
        if (std::abs(z0) >= cuts.z0_max) continue;
        // in-node is the smaller-r endpoint
        if (dr > 0.0)
          graph.edges.emplace_back(a, b);
        else
          graph.edges.emplace_back(b, a);
        if (stats) ++stats->kept;
      }
    }
  }
  return graph;
}

void label_edges(SubGraph& graph, const Event& sector_event) {
  // consecutive-in-r pairs per particle
  std::unordered_map<long long, std::vector<int>> track_hits;
  for (std::size_t i = 0; i < sector_event.hits.size(); ++i) {
    const long long pid = sector_event.hits[i].particle_id;
    if (pid != 0) track_hits[pid].push_back(static_cast<int>(i));
  }
  std::set<std::pair<int, int>> true_pairs;
  for (auto& [pid, idx] : track_hits) {
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return sector_event.hits[a].r() < sector_event.hits[b].r();
    });
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
      true_pairs.insert({idx[i], idx[i + 1]});
  }
  graph.labels.resize(graph.edges.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e)
    graph.labels[e] = true_pairs.count(graph.edges[e]) ? 1 : 0;
}

void save_subgraph(const SubGraph& graph, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "qsubgraph 1 " << graph.event_id << ' ' << graph.phi_sector << ' '
    << graph.z_sector << ' ' << graph.num_nodes() << ' ' << graph.num_edges()
    << '\n';
  for (const auto& n : graph.node_features)
    f << fmt(n[0]) << ' ' << fmt(n[1]) << ' ' << fmt(n[2]) << '\n';
  for (std::size_t e = 0; e < graph.edges.size(); ++e)
    f << graph.edges[e].first << ' ' << graph.edges[e].second << ' '
      << (e < graph.labels.size() ? graph.labels[e] : 0) << '\n';
  if (!f.good()) throw std::runtime_error("write failed: " + path.string());
}

SubGraph load_subgraph(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path.string());
  std::string magic;
  int version = 0;
  std::size_t n_nodes = 0, n_edges = 0;
  SubGraph graph;
  f >> magic >> version >> graph.event_id >> graph.phi_sector >>
      graph.z_sector >> n_nodes >> n_edges;
  if (!f || magic != "qsubgraph" || version != 1)
    throw ParseError(path.string() + ": bad subgraph header");
  graph.node_features.resize(n_nodes);
  for (auto& n : graph.node_features) f >> n[0] >> n[1] >> n[2];
  graph.edges.resize(n_edges);
  graph.labels.resize(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e)
    f >> graph.edges[e].first >> graph.edges[e].second >> graph.labels[e];
  if (!f) throw ParseError(path.string() + ": truncated subgraph file");
  graph.validate();
  return graph;
}

std::array<SubGraph, 16> build_event_graphs(const Event& event,
                                            const SelectionCuts& cuts,
                                            EdgeBuildStats* stats) {
  const Event cut = apply_truth_cuts(event, cuts);
  const auto sectors = split_sectors(cut);
  std::array<SubGraph, 16> graphs;
  for (int s = 0; s < 16; ++s) {
    graphs[s] = build_edges(sectors[s], cuts, s / 2, s % 2, stats);
    label_edges(graphs[s], sectors[s]);
  }
  return graphs;
}

}  // namespace qtrack
