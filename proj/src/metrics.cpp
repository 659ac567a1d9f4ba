#include "qtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {
double clamp_prob(double p) {
  return std::min(1.0 - kProbClampEps, std::max(kProbClampEps, p));
}
}  // namespace

ClassWeights balanced_weights(std::span<const int> labels) {
  const double total = static_cast<double>(labels.size());
  double pos = 0;
  for (int y : labels) pos += y;
  const double neg = total - pos;
  ClassWeights w;
  if (pos > 0) w.w_pos = total / (2.0 * pos);
  if (neg > 0) w.w_neg = total / (2.0 * neg);
  return w;
}

double weighted_bce(std::span<const double> probs, std::span<const int> labels,
                    const ClassWeights& weights) {
  if (probs.size() != labels.size())
    throw DimensionError("probs/labels length mismatch");
  if (probs.empty()) throw std::domain_error("empty input to weighted_bce");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    loss -= labels[i] ? weights.w_pos * std::log(p)
                      : weights.w_neg * std::log(1.0 - p);
  }
  return loss / static_cast<double>(probs.size());
}

std::vector<double> weighted_bce_grad(std::span<const double> probs,
                                      std::span<const int> labels,
                                      const ClassWeights& weights) {
  if (probs.size() != labels.size())
    throw DimensionError("probs/labels length mismatch");
  if (probs.empty()) throw std::domain_error("empty input to weighted_bce");
  const double inv_n = 1.0 / static_cast<double>(probs.size());
  std::vector<double> grad(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (p < kProbClampEps || p > 1.0 - kProbClampEps) {
      grad[i] = 0.0;  // clamp active, flat in p
      continue;
    }
    grad[i] = labels[i] ? -inv_n * weights.w_pos / p
                        : inv_n * weights.w_neg / (1.0 - p);
  }
  return grad;
}

double roc_auc(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size())
    throw DimensionError("probs/labels length mismatch");
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y != 0;
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::domain_error("roc_auc needs both classes");

  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

  // midranks over tie groups; U = sum of positive ranks - n_pos(n_pos+1)/2
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && probs[order[j]] == probs[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) rank_sum_pos += midrank;
    i = j;
  }
  const double u = rank_sum_pos -
                   static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace qtrack
