#pragma once

#include <random>
#include <span>
#include <vector>

namespace qtrack {

// One merge step of the tree: Ry on each input qubit, then CNOT
// first -> second. The second qubit carries the merged information upward.
struct TtnBlock {
  int layer;
  int first;
  int second;
  int survivor;  // == second
};

// Pairing tree over n qubits, n-1 blocks, one readout qubit at the root.
struct TtnTopology {
  int n_qubits = 0;
  std::vector<TtnBlock> blocks;
  int output_qubit = 0;

  int num_params() const { return 2 * (n_qubits - 1); }
};

// Trainable angles, two per block in block order.
struct TtnParams {
  std::vector<double> thetas;
};

// Deterministic left-to-right pairing: adjacent active qubits merge, an odd
// trailing qubit passes to the next layer untouched, until one survivor
// remains. Throws ConfigError unless 2 <= n_qubits <= 14.
TtnTopology build_ttn(int n_qubits);

// Uniform draws from [0, 2*pi).
TtnParams random_ttn_params(const TtnTopology& topology, std::mt19937_64& rng);

// Maps features in [0,1] to Ry angles in [0, 2*pi]. Throws std::domain_error
// when a feature leaves [0,1] by more than 1e-9.
std::vector<double> encode_features(std::span<const double> features);

// Full classifier: encode, run the tree, return P(|1>) on the output qubit.
double ttn_forward(const TtnTopology& topology, const TtnParams& params,
                   std::span<const double> features);

// Same, but takes raw encoding angles (no [0,1] domain check, no 2*pi map).
// The gradient engine shifts these angles directly.
double ttn_forward_angles(const TtnTopology& topology, const TtnParams& params,
                          std::span<const double> angles);

}  // namespace qtrack
