#pragma once

#include <span>
#include <vector>

namespace qtrack {

constexpr double kProbClampEps = 1e-7;

// Per-subgraph balanced class weights: w_pos = E / (2 E_pos),
// w_neg = E / (2 E_neg); an absent class gets weight 1.
struct ClassWeights {
  double w_pos = 1.0;
  double w_neg = 1.0;
};
ClassWeights balanced_weights(std::span<const int> labels);

// Weighted binary cross entropy, probabilities clamped to
// [kProbClampEps, 1 - kProbClampEps]. Throws DimensionError on length
// mismatch, std::domain_error on empty input.
double weighted_bce(std::span<const double> probs, std::span<const int> labels,
                    const ClassWeights& weights);

// dLoss/dprob_i of weighted_bce; zero where the clamp is active.
std::vector<double> weighted_bce_grad(std::span<const double> probs,
                                      std::span<const int> labels,
                                      const ClassWeights& weights);

// Rank-based AUC (Mann-Whitney, ties count 1/2). Throws std::domain_error
// unless both classes are present.
double roc_auc(std::span<const double> probs, std::span<const int> labels);

}  // namespace qtrack
