#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qtrack/ttn.hpp"

namespace qtrack {

// Parameter-shift derivatives of a TTN score with respect to circuit
// parameters and input features.
struct CircuitJacobian {
  std::vector<double> d_params;  // dscore/dtheta_k
  std::vector<double> d_inputs;  // dscore/dfeature_i, includes the 2*pi factor
};

// d score / d theta_k via [score(theta_k + pi/2) - score(theta_k - pi/2)] / 2.
// Exact for Ry-generated parameters.
double shift_grad_param(const TtnTopology& topology, const TtnParams& params,
                        std::span<const double> features, std::size_t k);

// d score / d feature_i: the encoding angle is an Ry angle too, so the same
// shift applies, chained with dangle/dfeature = 2*pi.
double shift_grad_input(const TtnTopology& topology, const TtnParams& params,
                        std::span<const double> features, std::size_t i);

// All shift derivatives of one circuit evaluation.
CircuitJacobian circuit_jacobian(const TtnTopology& topology,
                                 const TtnParams& params,
                                 std::span<const double> features);

// Central differences [f(x+h) - f(x-h)] / (2h) per coordinate. Verification
// only (tests and the grad-check command). Requires h in [1e-8, 1e-2];
// throws NumericError on non-finite f evaluations.
std::vector<double> finite_diff_oracle(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> point, double h);

}  // namespace qtrack
