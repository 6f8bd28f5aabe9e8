#pragma once

#include <Eigen/Dense>

#include "evalbench/posteriors/layer.hpp"

namespace evalbench::posteriors {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Differential entropy sum log sigma + (D/2) log(2 pi e).
double entropy_gaussian(const MeanFieldLayer& layer);
/// sum log sigma + log(2 pi)/2 + 1/2.
double entropy_radial(const MeanFieldLayer& layer);
/// Entropy of the per-coordinate truncation of eps to [-c, c].
double entropy_truncated(const MeanFieldLayer& layer, double c);

/// Sum over weights of KL(q_i || p_i) for diagonal Gaussians.
double kl_diag_gaussians(const MeanFieldLayer& q, const MeanFieldLayer& p);

/// KL(N(m, S) || N(m, diag S)) = (sum log S_ii - log det S) / 2.
/// Throws InvalidArgument when S is not symmetric positive definite.
double kl_full_vs_diag(const Eigen::MatrixXd& cov);

/// MC estimate of E_q[log p(w)] for a radial prior p with parameters
/// (prior.mu, prior.sigma), evaluated through the hyperspherical density
/// of v = (w - mu_p) / sigma_p with the change-of-variables Jacobian kept:
/// log p(w) = log q_eps(T(v)) - log J(v) - sum log sigma_p.
/// The normaliser shared by every parameter setting is not removed; the
/// prior equal to q therefore reproduces -entropy_radial(q).
McEstimate radial_prior_cross_entropy(const MeanFieldLayer& q, const MeanFieldLayer& prior, std::size_t samples,
                                      RngStream& rng);

/// log p(w) under a radial distribution, for w of any dimension D >= 1.
double radial_log_density(const MeanFieldLayer& dist, const Tensor& w);

/// Density of |x| for x ~ N(0, sigma^2 I_D).
double gaussian_radius_pdf(double r, std::size_t d, double sigma);

}  // namespace evalbench::posteriors
