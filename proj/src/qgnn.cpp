#include "qtrack/qgnn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "qtrack/autodiff.hpp"
#include "qtrack/errors.hpp"
#include "qtrack/metrics.hpp"
#include "qtrack/parallel.hpp"

namespace qtrack {

namespace {

constexpr double kAggEps = 1e-8;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Weighted-average messages per node plus the caches backward needs.
struct Aggregation {
  std::vector<NodeState> m_in;
  std::vector<NodeState> m_out;
  std::vector<double> den_in;   // sum of incoming edge weights + eps
  std::vector<double> den_out;  // sum of outgoing edge weights + eps
};

Aggregation aggregate(std::span<const NodeState> states,
                      std::span<const std::pair<int, int>> edges,
                      std::span<const double> weights) {
  const std::size_t n = states.size();
  Aggregation agg;
  agg.m_in.assign(n, {0, 0, 0, 0});
  agg.m_out.assign(n, {0, 0, 0, 0});
  agg.den_in.assign(n, 0.0);
  agg.den_out.assign(n, 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [j, k] = edges[e];
    const double w = weights[e];
    for (int c = 0; c < 4; ++c) {
      agg.m_in[k][c] += w * states[j][c];
      agg.m_out[j][c] += w * states[k][c];
    }
    agg.den_in[k] += w;
    agg.den_out[j] += w;
  }
  for (std::size_t k = 0; k < n; ++k) {
    agg.den_in[k] += kAggEps;
    agg.den_out[k] += kAggEps;
    for (int c = 0; c < 4; ++c) {
      agg.m_in[k][c] /= agg.den_in[k];
      agg.m_out[k][c] /= agg.den_out[k];
    }
  }
  return agg;
}

std::array<double, 12> qnon_features(const Aggregation& agg,
                                     const NodeState& own, std::size_t k) {
  std::array<double, 12> f;
  for (int c = 0; c < 4; ++c) {
    f[c] = agg.m_in[k][c];
    f[4 + c] = agg.m_out[k][c];
    f[8 + c] = own[c];
  }
  return f;
}

std::array<double, 8> edge_features(const NodeState& a, const NodeState& b) {
  return {a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]};
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw NumericError(std::string("non-finite value in ") + what);
}

}  // namespace

void ModelParams::validate() const {
  if (d_hid != 1) throw ConfigError("d_hid is fixed to 1 in this artifact");
  if (n_iterations < 1) throw ConfigError("n_iterations must be >= 1");
  if (input_w.size() != 3 * static_cast<std::size_t>(d_hid))
    throw DimensionError("input_w must have d_hid*3 entries");
  if (input_b.size() != static_cast<std::size_t>(d_hid))
    throw DimensionError("input_b must have d_hid entries");
  const std::size_t qen_n = 2 * (3 + d_hid);
  const std::size_t qnon_n = 3 * (3 + d_hid);
  if (qen.thetas.size() != 2 * (qen_n - 1))
    throw DimensionError("qen must have " + std::to_string(2 * (qen_n - 1)) +
                         " angles");
  if (qnon.thetas.size() != 2 * (qnon_n - 1))
    throw DimensionError("qnon must have " + std::to_string(2 * (qnon_n - 1)) +
                         " angles");
}

ModelParams random_model(int n_iterations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> small(-1.0, 1.0);
  ModelParams p;
  p.d_hid = 1;
  p.n_iterations = n_iterations;
  p.input_w = {small(rng), small(rng), small(rng)};
  p.input_b = {small(rng)};
  const TtnTopology qen_topo = build_ttn(8);
  const TtnTopology qnon_topo = build_ttn(12);
  p.qen = random_ttn_params(qen_topo, rng);
  p.qnon = random_ttn_params(qnon_topo, rng);
  p.validate();
  return p;
}

QgnnModel::QgnnModel() : qen_topo_(build_ttn(8)), qnon_topo_(build_ttn(12)) {}

std::vector<NodeState> QgnnModel::input_network(const SubGraph& graph,
                                                const ModelParams& params) const {
  params.validate();
  std::vector<NodeState> states(graph.num_nodes());
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    const auto& f = graph.node_features[i];
    const double z =
        params.input_w[0] * f[0] + params.input_w[1] * f[1] +
        params.input_w[2] * f[2] + params.input_b[0];
    states[i] = {f[0], f[1], f[2], sigmoid(z)};
  }
  return states;
}

std::vector<double> QgnnModel::edge_network(
    std::span<const NodeState> states,
    std::span<const std::pair<int, int>> edges, const TtnParams& qen) const {
  std::vector<double> weights(edges.size());
  parallel_for(edges.size(), [&](std::size_t e) {
    const auto [j, k] = edges[e];
    const auto f = edge_features(states[j], states[k]);
    weights[e] = ttn_forward(qen_topo_, qen, f);
  });
  return weights;
}

std::vector<NodeState> QgnnModel::node_network(
    std::span<const NodeState> states,
    std::span<const std::pair<int, int>> edges,
    std::span<const double> edge_weights, const TtnParams& qnon) const {
  if (edge_weights.size() != edges.size())
    throw DimensionError("edge weights not aligned with edges");
  const Aggregation agg = aggregate(states, edges, edge_weights);
  std::vector<NodeState> out(states.begin(), states.end());
  parallel_for(states.size(), [&](std::size_t k) {
    const auto f = qnon_features(agg, states[k], k);
    out[k][3] = ttn_forward(qnon_topo_, qnon, f);
  });
  return out;
}

std::vector<double> QgnnModel::forward(const SubGraph& graph,
                                       const ModelParams& params) const {
  if (graph.num_edges() == 0) return {};
  std::vector<NodeState> states = input_network(graph, params);
  for (int it = 0; it < params.n_iterations; ++it) {
    const auto weights = edge_network(states, graph.edges, params.qen);
    states = node_network(states, graph.edges, weights, params.qnon);
  }
  return edge_network(states, graph.edges, params.qen);
}

QgnnModel::LossAndGrad QgnnModel::loss_gradient(
    const SubGraph& graph, const ModelParams& params,
    std::span<const int> labels) const {
  params.validate();
  if (labels.size() != graph.num_edges())
    throw DimensionError("labels not aligned with edges");
  if (graph.num_edges() == 0)
    throw std::domain_error("cannot take loss gradient of an empty graph");

  const std::size_t n_nodes = graph.num_nodes();
  const std::size_t n_edges = graph.num_edges();
  const auto& edges = graph.edges;

  // forward, keeping every iteration's states, weights and aggregation
  std::vector<NodeState> states0 = input_network(graph, params);
  struct IterTrace {
    std::vector<double> edge_w;
    Aggregation agg;
    std::vector<NodeState> states_after;
  };
  std::vector<IterTrace> trace(params.n_iterations);
  const std::vector<NodeState>* cur = &states0;
  for (int it = 0; it < params.n_iterations; ++it) {
    IterTrace& t = trace[it];
    t.edge_w = edge_network(*cur, edges, params.qen);
    t.agg = aggregate(*cur, edges, t.edge_w);
    t.states_after.assign(cur->begin(), cur->end());
    parallel_for(n_nodes, [&](std::size_t k) {
      const auto f = qnon_features(t.agg, (*cur)[k], k);
      t.states_after[k][3] = ttn_forward(qnon_topo_, params.qnon, f);
    });
    cur = &t.states_after;
  }
  const std::vector<double> probs = edge_network(*cur, edges, params.qen);

  const ClassWeights cw = balanced_weights(labels);
  LossAndGrad result;
  result.loss = weighted_bce(probs, labels, cw);
  check_finite(result.loss, "loss");
  const std::vector<double> dprobs = weighted_bce_grad(probs, labels, cw);

  ModelGrad& g = result.grad;
  g.input_w.assign(3, 0.0);
  g.input_b.assign(1, 0.0);
  g.qen.assign(params.qen.thetas.size(), 0.0);
  g.qnon.assign(params.qnon.thetas.size(), 0.0);

  // adjoint of the hidden component per node, for the current layer of states
  std::vector<double> ah(n_nodes, 0.0);

  // Backward through one edge-network application: accumulates the QEN
  // parameter gradient and pushes adjoints onto endpoint hidden states.
  auto backward_edge_net = [&](const std::vector<NodeState>& in_states,
                               std::span<const double> adj_edge,
                               std::vector<double>& adj_h) {
    std::vector<CircuitJacobian> jacs(n_edges);
    parallel_for(n_edges, [&](std::size_t e) {
      if (adj_edge[e] == 0.0) return;
      const auto [j, k] = edges[e];
      const auto f = edge_features(in_states[j], in_states[k]);
      jacs[e] = circuit_jacobian(qen_topo_, params.qen, f);
    });
    for (std::size_t e = 0; e < n_edges; ++e) {
      if (adj_edge[e] == 0.0) continue;
      const auto [j, k] = edges[e];
      for (std::size_t t = 0; t < g.qen.size(); ++t)
        g.qen[t] += adj_edge[e] * jacs[e].d_params[t];
      adj_h[j] += adj_edge[e] * jacs[e].d_inputs[3];
      adj_h[k] += adj_edge[e] * jacs[e].d_inputs[7];
    }
  };

  backward_edge_net(*cur, dprobs, ah);

  for (int it = params.n_iterations - 1; it >= 0; --it) {
    const IterTrace& t = trace[it];
    const std::vector<NodeState>& prev =
        it == 0 ? states0 : trace[it - 1].states_after;

    // node network backward
    std::vector<CircuitJacobian> jacs(n_nodes);
    parallel_for(n_nodes, [&](std::size_t k) {
      if (ah[k] == 0.0) return;
      const auto f = qnon_features(t.agg, prev[k], k);
      jacs[k] = circuit_jacobian(qnon_topo_, params.qnon, f);
    });

    std::vector<double> ah_prev(n_nodes, 0.0);
    std::vector<double> ae(n_edges, 0.0);

    // per-node adjoint of the 12 QNoN inputs, then distribute onto edge
    // weights, neighbor hidden states and the node's own state
    std::vector<std::array<double, 12>> af(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k)
      for (int c = 0; c < 12; ++c)
        af[k][c] = ah[k] == 0.0 ? 0.0 : ah[k] * jacs[k].d_inputs[c];
    for (std::size_t k = 0; k < n_nodes; ++k) {
      if (ah[k] == 0.0) continue;
      for (std::size_t p = 0; p < g.qnon.size(); ++p)
        g.qnon[p] += ah[k] * jacs[k].d_params[p];
      ah_prev[k] += af[k][11];  // own hidden input
    }
    for (std::size_t e = 0; e < n_edges; ++e) {
      const auto [j, k] = edges[e];
      const double w = t.edge_w[e];
      // m_in of node k uses state_j; m_out of node j uses state_k
      for (int c = 0; c < 4; ++c) {
        ae[e] += af[k][c] * (prev[j][c] - t.agg.m_in[k][c]) / t.agg.den_in[k];
        ae[e] +=
            af[j][4 + c] * (prev[k][c] - t.agg.m_out[j][c]) / t.agg.den_out[j];
      }
      ah_prev[j] += af[k][3] * w / t.agg.den_in[k];
      ah_prev[k] += af[j][7] * w / t.agg.den_out[j];
    }

    backward_edge_net(prev, ae, ah_prev);
    ah = std::move(ah_prev);
  }

  // input network: dh/dz = h(1-h)
  for (std::size_t k = 0; k < n_nodes; ++k) {
    if (ah[k] == 0.0) continue;
    const double h = states0[k][3];
    const double dz = ah[k] * h * (1.0 - h);
    for (int c = 0; c < 3; ++c) g.input_w[c] += dz * graph.node_features[k][c];
    g.input_b[0] += dz;
  }

  for (double v : g.input_w) check_finite(v, "input_w gradient");
  for (double v : g.qen) check_finite(v, "qen gradient");
  for (double v : g.qnon) check_finite(v, "qnon gradient");
  check_finite(g.input_b[0], "input_b gradient");
  return result;
}

}  // namespace qtrack
