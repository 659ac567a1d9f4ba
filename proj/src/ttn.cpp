#include "qtrack/ttn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qtrack/errors.hpp"
#include "qtrack/statevector.hpp"

namespace qtrack {

TtnTopology build_ttn(int n_qubits) {
  if (n_qubits < 2 || n_qubits > StateVector::kMaxQubits)
    throw ConfigError("ttn width must be in [2, 14], got " +
                      std::to_string(n_qubits));
  TtnTopology topo;
  topo.n_qubits = n_qubits;
  std::vector<int> active(n_qubits);
  for (int q = 0; q < n_qubits; ++q) active[q] = q;
  int layer = 0;
  while (active.size() > 1) {
    std::vector<int> next;
    for (std::size_t i = 0; i + 1 < active.size(); i += 2) {
      topo.blocks.push_back({layer, active[i], active[i + 1], active[i + 1]});
      next.push_back(active[i + 1]);
    }
    if (active.size() % 2 == 1) next.push_back(active.back());
    active = std::move(next);
    ++layer;
  }
  topo.output_qubit = active.front();
  return topo;
}

TtnParams random_ttn_params(const TtnTopology& topology, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi);
  TtnParams p;
  p.thetas.resize(topology.num_params());
  for (auto& t : p.thetas) t = dist(rng);
  return p;
}

std::vector<double> encode_features(std::span<const double> features) {
  std::vector<double> angles(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double f = features[i];
    if (!(f >= -1e-9 && f <= 1.0 + 1e-9))
      throw std::domain_error("feature " + std::to_string(i) + " = " +
                              std::to_string(f) +
                              " outside [0,1]; upstream normalization broken");
    angles[i] = 2.0 * std::numbers::pi * f;
  }
  return angles;
}

double ttn_forward_angles(const TtnTopology& topology, const TtnParams& params,
                          std::span<const double> angles) {
  if (static_cast<int>(angles.size()) != topology.n_qubits)
    throw DimensionError("expected " + std::to_string(topology.n_qubits) +
                         " encoding angles, got " +
                         std::to_string(angles.size()));
  if (static_cast<int>(params.thetas.size()) != topology.num_params())
    throw DimensionError("expected " + std::to_string(topology.num_params()) +
                         " circuit parameters, got " +
                         std::to_string(params.thetas.size()));
  StateVector state(topology.n_qubits);
  for (int q = 0; q < topology.n_qubits; ++q) state.apply_ry(q, angles[q]);
  for (std::size_t b = 0; b < topology.blocks.size(); ++b) {
    const TtnBlock& blk = topology.blocks[b];
    state.apply_ry(blk.first, params.thetas[2 * b]);
    state.apply_ry(blk.second, params.thetas[2 * b + 1]);
    state.apply_cnot(blk.first, blk.second);
  }
  return (1.0 - state.expectation_z(topology.output_qubit)) / 2.0;
}

double ttn_forward(const TtnTopology& topology, const TtnParams& params,
                   std::span<const double> features) {
  return ttn_forward_angles(topology, params, encode_features(features));
}

}  // namespace qtrack
