#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <utility>
#include <vector>

#include "qtrack/hitdata.hpp"

namespace qtrack {

// Preprocessing cuts applied before graph construction.
struct SelectionCuts {
  double pt_min = 1.0;           // GeV
  double phi_slope_max = 0.0006; // rad/mm, cut on dphi/dr
  double z0_max = 100.0;         // mm
  double eta_min = -5.0;
  double eta_max = 5.0;
};

// Detector-envelope scales used to map (r, phi, z) into [0,1].
struct FeatureScales {
  double r_max = 1100.0;     // mm
  double z_abs_max = 1100.0; // mm
};

// One sector's graph: normalized node features, directed candidate edges
// (in-node is the smaller-r endpoint) and truth labels.
struct SubGraph {
  std::vector<std::array<double, 3>> node_features;  // (r', phi', z') in [0,1]
  std::vector<std::pair<int, int>> edges;
  std::vector<int> labels;  // 0/1 per edge, empty until label_edges
  long long event_id = 0;
  int phi_sector = 0;  // 0..7
  int z_sector = 0;    // 0..1

  std::size_t num_nodes() const { return node_features.size(); }
  std::size_t num_edges() const { return edges.size(); }

  // Enforces the type invariants; throws DimensionError / domain_error.
  void validate() const;
};

struct EdgeBuildStats {
  std::size_t candidate_pairs = 0;
  std::size_t kept = 0;
  std::size_t zero_dr_skipped = 0;
};

// Drops noise hits and hits whose particle fails the pt/eta cuts.
Event apply_truth_cuts(const Event& event, const SelectionCuts& cuts);

// 8 phi bins of width pi/4 over (-pi, pi] times 2 z bins (z<0, z>=0).
// Half-open bins, ties go to the upper bin. Index = phi_sector * 2 + z_sector.
std::array<Event, 16> split_sectors(const Event& event);

// Candidate edges between adjacent layers passing the phi-slope and z0 cuts.
// Labels are left empty; hit order inside sector_event defines node indices.
SubGraph build_edges(const Event& sector_event, const SelectionCuts& cuts,
                     int phi_sector, int z_sector,
                     EdgeBuildStats* stats = nullptr,
                     const FeatureScales& scales = {});

// Label 1 iff both hits belong to the same nonzero particle and are
// consecutive in that particle's hits ordered by increasing r.
void label_edges(SubGraph& graph, const Event& sector_event);

// Flat-file persistence, bit-exact round trip.
void save_subgraph(const SubGraph& graph, const std::filesystem::path& path);
SubGraph load_subgraph(const std::filesystem::path& path);

// Convenience: full pipeline for one event, 16 labeled subgraphs.
std::array<SubGraph, 16> build_event_graphs(const Event& event,
                                            const SelectionCuts& cuts,
                                            EdgeBuildStats* stats = nullptr);

}  // namespace qtrack
