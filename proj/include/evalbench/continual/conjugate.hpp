#pragma once

#include "evalbench/continual/stream.hpp"

namespace evalbench::continual {

/// Gaussian over the coefficients (intercept first) of y = a + b^T x + noise.
struct LinearGaussianPosterior {
  std::vector<double> mean;
  Tensor covariance;  // (d + 1, d + 1)

  static LinearGaussianPosterior isotropic(std::size_t dim, double prior_sigma);
};

/// Exact Bayesian update on one regression task with known noise sigma.
LinearGaussianPosterior conjugate_update(const LinearGaussianPosterior& prior, const Dataset& task,
                                         double noise_sigma);

/// Sequential updates in the given order, each posterior becoming the next prior.
LinearGaussianPosterior sequential_conjugate(const LinearGaussianPosterior& prior, std::span<const Dataset> tasks,
                                             double noise_sigma);

}  // namespace evalbench::continual
