#include "qtrack/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "qtrack/errors.hpp"

namespace qtrack {

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ConfigError("n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                      "], got " + std::to_string(n_qubits));
  amps_.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
  amps_[0] = {1.0, 0.0};
}

void StateVector::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_)
    throw std::out_of_range("qubit index " + std::to_string(qubit) +
                            " out of range for " + std::to_string(n_qubits_) +
                            " qubits");
}

void StateVector::apply_ry(int qubit, double theta) {
  check_qubit(qubit);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const std::size_t mask = std::size_t{1} << qubit;
  const std::size_t n = amps_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i & mask) continue;
    const std::size_t j = i | mask;
    const std::complex<double> a = amps_[i];
    const std::complex<double> b = amps_[j];
    amps_[i] = c * a - s * b;
    amps_[j] = s * a + c * b;
  }
}

void StateVector::apply_cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target)
    throw ConfigError("cnot control and target must differ");
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t tmask = std::size_t{1} << target;
  const std::size_t n = amps_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(amps_[i], amps_[i | tmask]);
  }
}

double StateVector::expectation_z(int qubit) const {
  check_qubit(qubit);
  const std::size_t mask = std::size_t{1} << qubit;
  double z = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    z += (i & mask) ? -p : p;
  }
  return z;
}

double StateVector::sample_expectation_z(int qubit, int shots,
                                         std::mt19937_64& rng) const {
  if (shots < 1) throw ConfigError("shots must be >= 1");
  const double p1 = (1.0 - expectation_z(qubit)) / 2.0;
  std::binomial_distribution<int> dist(shots, std::min(std::max(p1, 0.0), 1.0));
  const int ones = dist(rng);
  return 1.0 - 2.0 * static_cast<double>(ones) / shots;
}

double StateVector::norm_sq() const {
  double n = 0.0;
  for (const auto& a : amps_) n += std::norm(a);
  return n;
}

}  // namespace qtrack
