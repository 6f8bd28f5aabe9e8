#pragma once

#include <memory>
#include <span>
#include <vector>

#include "evalbench/bnn/train.hpp"
#include "evalbench/data/dataset.hpp"
#include "evalbench/numcore/rng.hpp"

namespace evalbench::active {

using data::Dataset;
using numcore::RngStream;

class FittedModel {
 public:
  virtual ~FittedModel() = default;
  /// Per-example loss on a labelled set.
  virtual std::vector<double> losses(const Dataset& ds) const = 0;
  /// Acquisition scores on unlabelled inputs (higher = more informative).
  virtual std::vector<double> scores(const numcore::Tensor& x, RngStream& rng) const = 0;
  /// Accuracy for classifiers; NaN for regressors.
  virtual double accuracy(const Dataset& ds) const = 0;
};

class Learner {
 public:
  virtual ~Learner() = default;
  /// Fits on `train` with per-example weights (empty = all ones).
  virtual std::unique_ptr<FittedModel> fit(const Dataset& train, std::span<const double> weights,
                                           std::uint64_t seed) const = 0;
};

/// Weighted least squares y ~ a + b^T x with squared-error loss. Scores are
/// zero (use a geometric proposal).
class LinearRegressionLearner final : public Learner {
 public:
  std::unique_ptr<FittedModel> fit(const Dataset& train, std::span<const double> weights,
                                   std::uint64_t seed) const override;
};

/// Linear fit coefficients (intercept first); throws NumericError when the
/// weighted normal equations are singular.
std::vector<double> weighted_least_squares(const numcore::Tensor& x, std::span<const double> y,
                                           std::span<const double> w);

struct BnnSpec {
  std::vector<std::size_t> hidden;
  bnn::PosteriorKind posterior = bnn::PosteriorKind::radial();
  bnn::Activation activation = bnn::Activation::relu();
  double prior_sigma = 0.25;
  double rho_init = -4.0;
  bnn::TrainConfig train;
  std::size_t acquisition_samples = 100;
  std::size_t test_samples = 8;
};

/// Classifier BNN; scores are BALD from `acquisition_samples` draws.
class BnnLearner final : public Learner {
 public:
  explicit BnnLearner(BnnSpec spec) : spec_(std::move(spec)) {}
  std::unique_ptr<FittedModel> fit(const Dataset& train, std::span<const double> weights,
                                   std::uint64_t seed) const override;
  const BnnSpec& spec() const { return spec_; }

 private:
  BnnSpec spec_;
};

/// Fitted BNN, exposed so probes can reach the trained parameters.
class BnnModel final : public FittedModel {
 public:
  BnnModel(bnn::BayesianMlp model, std::size_t acquisition_samples, std::size_t test_samples, std::uint64_t seed)
      : model_(std::move(model)), acquisition_samples_(acquisition_samples), test_samples_(test_samples), seed_(seed) {}
  std::vector<double> losses(const Dataset& ds) const override;
  std::vector<double> scores(const numcore::Tensor& x, RngStream& rng) const override;
  double accuracy(const Dataset& ds) const override;
  const bnn::BayesianMlp& model() const { return model_; }

 private:
  bnn::BayesianMlp model_;
  std::size_t acquisition_samples_;
  std::size_t test_samples_;
  std::uint64_t seed_;
};

}  // namespace evalbench::active
