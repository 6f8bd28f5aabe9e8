#include "evalbench/posteriors/divergences.hpp"

#include <cmath>
#include <numbers>

#include "evalbench/numcore/autodiff.hpp"
#include "evalbench/numcore/error.hpp"
#include "evalbench/posteriors/hyperspherical.hpp"
#include "evalbench/posteriors/samplers.hpp"

namespace evalbench::posteriors {

namespace {

constexpr double kPi = std::numbers::pi;

double sum_log_sigma(const MeanFieldLayer& layer) {
  double s = 0.0;
  for (double r : layer.rho.data()) s += std::log(numcore::softplus(r));
  return s;
}

}  // namespace

double entropy_gaussian(const MeanFieldLayer& layer) {
  return sum_log_sigma(layer) + 0.5 * static_cast<double>(layer.size()) * std::log(2.0 * kPi * std::numbers::e);
}

double entropy_radial(const MeanFieldLayer& layer) { return sum_log_sigma(layer) + 0.5 * std::log(2.0 * kPi) + 0.5; }

double entropy_truncated(const MeanFieldLayer& layer, double c) {
  if (!(c > 0.0)) throw InvalidArgument("entropy_truncated: c must be > 0");
  const double phi = std::exp(-0.5 * c * c) / std::sqrt(2.0 * kPi);
  const double z = std::erf(c / std::numbers::sqrt2);
  const double per = std::log(std::sqrt(2.0 * kPi * std::numbers::e) * z) - c * phi / z;
  return sum_log_sigma(layer) + static_cast<double>(layer.size()) * per;
}

double kl_diag_gaussians(const MeanFieldLayer& q, const MeanFieldLayer& p) {
  numcore::require_same_shape(q.mu, p.mu, "kl_diag_gaussians");
  double kl = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double sq = numcore::softplus(q.rho[i]);
    const double sp = numcore::softplus(p.rho[i]);
    const double dm = q.mu[i] - p.mu[i];
    kl += std::log(sp / sq) + (sq * sq + dm * dm) / (2.0 * sp * sp) - 0.5;
  }
  return kl;
}

double kl_full_vs_diag(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw DimensionError("kl_full_vs_diag: covariance must be square");
  if (!cov.isApprox(cov.transpose(), 1e-12)) throw InvalidArgument("kl_full_vs_diag: covariance not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw InvalidArgument("kl_full_vs_diag: covariance not positive definite");
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  double logdiag = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) logdiag += std::log(cov(i, i));
  return 0.5 * (logdiag - logdet);
}

double radial_log_density(const MeanFieldLayer& dist, const Tensor& w) {
  numcore::require_same_shape(dist.mu, w, "radial_log_density");
  std::vector<double> v(w.size());
  double log_sigma = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = numcore::softplus(dist.rho[i]);
    v[i] = (w[i] - dist.mu[i]) / s;
    log_sigma += std::log(s);
  }
  if (v.size() == 1) {
    // Both signs share the half-normal mass of |v|.
    return -0.5 * std::log(2.0 * kPi) - 0.5 * v[0] * v[0] - log_sigma;
  }
  const Hyperspherical h = cart_to_hyperspherical(v);
  return radial_logpdf_hyperspherical(h) - log_jacobian(h) - log_sigma;
}

McEstimate radial_prior_cross_entropy(const MeanFieldLayer& q, const MeanFieldLayer& prior, std::size_t samples,
                                      RngStream& rng) {
  if (samples == 0) throw InvalidArgument("radial_prior_cross_entropy: need at least one sample");
  numcore::require_same_shape(q.mu, prior.mu, "radial_prior_cross_entropy");
  double mean = 0.0, m2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double lp;
    for (;;) {
      WeightSample w = sample_radial(q, rng);
      try {
        lp = radial_log_density(prior, w.values);
        break;
      } catch (const InvalidArgument&) {
        // w landed exactly on the prior mean; redraw.
      }
    }
    const double delta = lp - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (lp - mean);
  }
  McEstimate e;
  e.value = mean;
  if (samples > 1) e.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return e;
}

double gaussian_radius_pdf(double r, std::size_t d, double sigma) {
  if (r < 0.0 || d == 0 || !(sigma > 0.0)) throw InvalidArgument("gaussian_radius_pdf: bad arguments");
  if (r == 0.0) return d == 1 ? 2.0 / std::sqrt(2.0 * kPi * sigma * sigma) : 0.0;
  const double dd = static_cast<double>(d);
  const double lp = log_sphere_area(d) - 0.5 * dd * std::log(2.0 * kPi * sigma * sigma) + (dd - 1.0) * std::log(r) -
                    r * r / (2.0 * sigma * sigma);
  return std::exp(lp);
}

}  // namespace evalbench::posteriors
