#pragma once

#include <span>
#include <vector>

#include "evalbench/numcore/tensor.hpp"

namespace evalbench::bnn {

using numcore::Tensor;

/// -sum p log p in nats with 0 log 0 = 0.
double predictive_entropy(std::span<const double> probs);

/// Entropy of the mean row minus the mean row entropy, clipped at 0.
/// `samples` has shape (S, C), S >= 2.
double bald_mi(const Tensor& samples);

/// BALD per example from S probability tables of shape (n, C).
std::vector<double> bald_scores(std::span<const Tensor> prob_samples);

/// Confidence-binned expected calibration error on max-probability
/// predictions; bins are [k/B, (k+1)/B) with the last bin closed.
double ece(const Tensor& mean_probs, std::span<const std::size_t> labels, std::size_t n_bins);

/// Accuracy on the (1 - f) fraction with the lowest uncertainty, for each f.
/// Ties keep index order.
std::vector<double> referral_curve(std::span<const double> uncertainty, const std::vector<bool>& correct,
                                   std::span<const double> referral_fracs);

}  // namespace evalbench::bnn
