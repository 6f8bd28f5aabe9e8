#pragma once

#include <span>
#include <vector>

#include "evalbench/bnn/elbo.hpp"

namespace evalbench::bnn {

/// One forward pass per weight draw. Classifier outputs are softmax rows
/// (n, C); regressors return means (n, 1). samples == 0 evaluates once at
/// the means.
std::vector<Tensor> predict_samples(const BayesianMlp& model, const Tensor& x, std::size_t samples, RngStream& rng);
std::vector<Tensor> predict_with_noise(const BayesianMlp& model, const Tensor& x, const Noise& noise);

/// Restricts probability rows to `classes` and renormalises (others set to 0).
Tensor restrict_classes(const Tensor& probs, std::span<const std::size_t> classes);

Tensor mean_prediction(std::span<const Tensor> samples);

/// Mean over examples of -log p(y | x) under the sample-averaged predictive.
double mean_nll(const BayesianMlp& model, const Dataset& ds, std::size_t samples, RngStream& rng,
                std::span<const std::size_t> allowed_classes = {});

/// Per-example predictive losses under the sample-averaged predictive:
/// -log p(y|x) for classifiers, squared error of the mean for regressors.
std::vector<double> per_example_loss(const BayesianMlp& model, const Dataset& ds, std::size_t samples, RngStream& rng);

/// Argmax (lowest index on ties) accuracy.
double accuracy(const Tensor& probs, std::span<const std::size_t> labels);
std::size_t argmax_row(std::span<const double> row);

/// Average of per-member probability tables (naive deep ensemble).
Tensor ensemble_average(std::span<const Tensor> member_probs);

}  // namespace evalbench::bnn
