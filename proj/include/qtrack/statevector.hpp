#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace qtrack {

// Dense n-qubit statevector with the gate set the TTN circuits need:
// Ry rotations, CNOT, Pauli-Z expectation on a single qubit.
//
// Convention: qubit 0 is the least significant bit of the amplitude index.
class StateVector {
 public:
  static constexpr int kMaxQubits = 14;

  // |0...0> register. Throws ConfigError unless 1 <= n_qubits <= 14.
  explicit StateVector(int n_qubits);

  int num_qubits() const { return n_qubits_; }
  std::size_t size() const { return amps_.size(); }
  const std::vector<std::complex<double>>& amps() const { return amps_; }

  // In-place rotation [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]] on one qubit.
  void apply_ry(int qubit, double theta);

  // In-place CNOT; throws ConfigError when control == target.
  void apply_cnot(int control, int target);

  // Exact <Z> on one qubit: sum of (+1/-1) * |amp|^2 over basis states.
  double expectation_z(int qubit) const;

  // Shot-sampled estimate of <Z> via binomial sampling of P(|1>).
  // Only for realism studies; everything deterministic uses expectation_z.
  double sample_expectation_z(int qubit, int shots, std::mt19937_64& rng) const;

  double norm_sq() const;

 private:
  void check_qubit(int qubit) const;

  int n_qubits_;
  std::vector<std::complex<double>> amps_;
};

}  // namespace qtrack
