#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qtrack/graph_builder.hpp"
#include "qtrack/ttn.hpp"

namespace qtrack {

// Node state: immutable spatial features (r', phi', z') plus one hidden
// value h in [0,1]. Only h changes during message passing.
using NodeState = std::array<double, 4>;

// All trainable parameters. The same QEN/QNoN angles are reused at every
// message-passing iteration (weight sharing).
struct ModelParams {
  std::vector<double> input_w;  // d_hid x 3, row-major
  std::vector<double> input_b;  // d_hid
  TtnParams qen;                // 2*(3+d_hid) qubits -> 14 angles at d_hid=1
  TtnParams qnon;               // 3*(3+d_hid) qubits -> 22 angles at d_hid=1
  int d_hid = 1;                // fixed to 1 in this artifact
  int n_iterations = 1;

  void validate() const;
};

ModelParams random_model(int n_iterations, std::uint64_t seed);

// Gradient of the loss with respect to every block of ModelParams.
struct ModelGrad {
  std::vector<double> input_w;
  std::vector<double> input_b;
  std::vector<double> qen;
  std::vector<double> qnon;
};

// The hybrid network: classical input layer, quantum edge network applied
// per edge, quantum node network applied per node, iterated n_iterations
// times, and a final edge network producing segment probabilities.
class QgnnModel {
 public:
  QgnnModel();

  const TtnTopology& qen_topology() const { return qen_topo_; }
  const TtnTopology& qnon_topology() const { return qnon_topo_; }

  // h = sigmoid(input_w * (r',phi',z') + input_b) per node.
  std::vector<NodeState> input_network(const SubGraph& graph,
                                       const ModelParams& params) const;

  // Edge weight e_jk = QEN(concat(state_j, state_k)) per edge.
  std::vector<double> edge_network(std::span<const NodeState> states,
                                   std::span<const std::pair<int, int>> edges,
                                   const TtnParams& qen) const;

  // New h_k = QNoN(concat(m_in, m_out, state_k)) with weighted-average
  // incoming/outgoing messages; spatial features copied unchanged.
  std::vector<NodeState> node_network(std::span<const NodeState> states,
                                      std::span<const std::pair<int, int>> edges,
                                      std::span<const double> edge_weights,
                                      const TtnParams& qnon) const;

  // Full forward pass: edge probabilities for every edge of the graph.
  std::vector<double> forward(const SubGraph& graph,
                              const ModelParams& params) const;

  struct LossAndGrad {
    double loss = 0.0;
    ModelGrad grad;
  };

  // Weighted-BCE loss and its exact gradient, reverse-mode through the
  // classical DAG with per-circuit parameter-shift Jacobians. Gradients of
  // shared circuit parameters accumulate over all iteration uses.
  LossAndGrad loss_gradient(const SubGraph& graph, const ModelParams& params,
                            std::span<const int> labels) const;

 private:
  TtnTopology qen_topo_;
  TtnTopology qnon_topo_;
};

}  // namespace qtrack
