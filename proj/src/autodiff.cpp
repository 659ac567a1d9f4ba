#include "qtrack/autodiff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {
constexpr double kShift = std::numbers::pi / 2.0;
}

double shift_grad_param(const TtnTopology& topology, const TtnParams& params,
                        std::span<const double> features, std::size_t k) {
  if (k >= params.thetas.size())
    throw std::out_of_range("parameter index " + std::to_string(k) +
                            " out of range");
  const std::vector<double> angles = encode_features(features);
  TtnParams shifted = params;
  shifted.thetas[k] = params.thetas[k] + kShift;
  const double plus = ttn_forward_angles(topology, shifted, angles);
  shifted.thetas[k] = params.thetas[k] - kShift;
  const double minus = ttn_forward_angles(topology, shifted, angles);
  return (plus - minus) / 2.0;
}

double shift_grad_input(const TtnTopology& topology, const TtnParams& params,
                        std::span<const double> features, std::size_t i) {
  if (i >= features.size())
    throw std::out_of_range("feature index " + std::to_string(i) +
                            " out of range");
  std::vector<double> angles = encode_features(features);
  const double base = angles[i];
  angles[i] = base + kShift;
  const double plus = ttn_forward_angles(topology, params, angles);
  angles[i] = base - kShift;
  const double minus = ttn_forward_angles(topology, params, angles);
  return 2.0 * std::numbers::pi * (plus - minus) / 2.0;
}

CircuitJacobian circuit_jacobian(const TtnTopology& topology,
                                 const TtnParams& params,
                                 std::span<const double> features) {
  const std::vector<double> angles = encode_features(features);
  CircuitJacobian jac;
  jac.d_params.resize(params.thetas.size());
  jac.d_inputs.resize(features.size());
  TtnParams shifted = params;
  for (std::size_t k = 0; k < params.thetas.size(); ++k) {
    shifted.thetas[k] = params.thetas[k] + kShift;
    const double plus = ttn_forward_angles(topology, shifted, angles);
    shifted.thetas[k] = params.thetas[k] - kShift;
    const double minus = ttn_forward_angles(topology, shifted, angles);
    shifted.thetas[k] = params.thetas[k];
    jac.d_params[k] = (plus - minus) / 2.0;
  }
  std::vector<double> shifted_angles = angles;
  for (std::size_t i = 0; i < features.size(); ++i) {
    shifted_angles[i] = angles[i] + kShift;
    const double plus = ttn_forward_angles(topology, params, shifted_angles);
    shifted_angles[i] = angles[i] - kShift;
    const double minus = ttn_forward_angles(topology, params, shifted_angles);
    shifted_angles[i] = angles[i];
    jac.d_inputs[i] = 2.0 * std::numbers::pi * (plus - minus) / 2.0;
  }
  return jac;
}

std::vector<double> finite_diff_oracle(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> point, double h) {
  if (!(h >= 1e-8 && h <= 1e-2))
    throw ConfigError("finite-difference step must be in [1e-8, 1e-2]");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double base = x[i];
    x[i] = base + h;
    const double plus = f(x);
    x[i] = base - h;
    const double minus = f(x);
    x[i] = base;
    if (!std::isfinite(plus) || !std::isfinite(minus))
      throw NumericError("non-finite function value in finite differences");
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

}  // namespace qtrack
