#include "evalbench/active/estimators.hpp"

#include <cmath>
#include <limits>

#include "evalbench/numcore/error.hpp"
#include "evalbench/numcore/summation.hpp"

namespace evalbench::active {

namespace {

void check_masses(std::span<const double> losses, std::span<const double> q, std::size_t n) {
  if (losses.empty()) throw InvalidArgument("risk estimate needs at least one loss");
  if (losses.size() != q.size()) throw DimensionError("losses and masses differ in length");
  if (losses.size() > n) throw InvalidArgument("more acquired points than the pool holds");
  for (double v : q)
    if (!(v > 0.0 && v <= 1.0)) throw InvalidArgument("proposal masses must lie in (0, 1]");
}

double weighted_mean(std::span<const double> w, std::span<const double> losses) {
  std::vector<double> terms(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) terms[i] = w[i] * losses[i];
  const double v = numcore::exact_sum(terms) / static_cast<double>(losses.size());
  if (!std::isfinite(v)) throw NumericError("risk estimate is not finite");
  return v;
}

}  // namespace

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::r_tilde: return "r_tilde";
    case Estimator::r_pure: return "r_pure";
    case Estimator::r_lure: return "r_lure";
    case Estimator::r_full: return "r_full";
  }
  return "?";
}

Estimator parse_estimator(const std::string& name) {
  if (name == "r_tilde" || name == "tilde") return Estimator::r_tilde;
  if (name == "r_pure" || name == "pure") return Estimator::r_pure;
  if (name == "r_lure" || name == "lure") return Estimator::r_lure;
  if (name == "r_full" || name == "full") return Estimator::r_full;
  throw InvalidArgument("unknown estimator '" + name + "'");
}

double pool_risk(std::span<const double> losses) {
  if (losses.empty()) throw InvalidArgument("pool_risk of an empty pool");
  return numcore::exact_sum(losses) / static_cast<double>(losses.size());
}

RiskEstimate r_tilde(std::span<const double> losses) {
  if (losses.empty()) throw InvalidArgument("risk estimate needs at least one loss");
  return {numcore::exact_sum(losses) / static_cast<double>(losses.size()), Estimator::r_tilde, losses.size(), 0};
}

std::vector<double> lure_weights(std::span<const double> q, std::size_t n) {
  const std::size_t big_m = q.size();
  if (big_m > n) throw InvalidArgument("more acquired points than the pool holds");
  const double dn = static_cast<double>(n);
  std::vector<double> v(big_m);
  for (std::size_t i = 0; i < big_m; ++i) {
    if (!(q[i] > 0.0)) throw InvalidArgument("proposal mass must be positive");
    const std::size_t m = i + 1;
    if (m == n) {  // only reachable when M = N; the correction is 0/0
      v[i] = 1.0;
      continue;
    }
    double ratio = static_cast<double>(n - m + 1) * q[i];
    if (std::abs(ratio - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) ratio = 1.0;
    v[i] = 1.0 + (dn - static_cast<double>(big_m)) / (dn - static_cast<double>(m)) * (1.0 / ratio - 1.0);
  }
  return v;
}

std::vector<double> pure_weights(std::span<const double> q, std::size_t n) {
  const std::size_t big_m = q.size();
  if (big_m > n) throw InvalidArgument("more acquired points than the pool holds");
  std::vector<double> w(big_m);
  for (std::size_t i = 0; i < big_m; ++i) {
    if (!(q[i] > 0.0)) throw InvalidArgument("proposal mass must be positive");
    // L_t enters its own term as L_t / q_t and every later term once.
    w[i] = (1.0 / q[i] + static_cast<double>(big_m - i - 1)) / static_cast<double>(n);
  }
  return w;
}

std::vector<double> estimator_weights(Estimator e, std::span<const double> q, std::size_t n) {
  switch (e) {
    case Estimator::r_tilde:
    case Estimator::r_full: return std::vector<double>(q.size(), 1.0);
    case Estimator::r_pure: return pure_weights(q, n);
    case Estimator::r_lure: return lure_weights(q, n);
  }
  return {};
}

RiskEstimate r_pure(std::span<const double> losses, std::span<const double> q, std::size_t n) {
  check_masses(losses, q, n);
  // Mean over m of (1/N) (sum_{t<m} L_t + L_m / q_m), each term computed as written.
  std::vector<double> terms(losses.size());
  double prefix = 0.0;
  for (std::size_t m = 0; m < losses.size(); ++m) {
    terms[m] = (prefix + losses[m] / q[m]) / static_cast<double>(n);
    prefix += losses[m];
  }
  const double v = numcore::exact_sum(terms) / static_cast<double>(losses.size());
  if (!std::isfinite(v)) throw NumericError("risk estimate is not finite");
  return {v, Estimator::r_pure, losses.size(), n};
}

RiskEstimate r_lure(std::span<const double> losses, std::span<const double> q, std::size_t n) {
  check_masses(losses, q, n);
  return {weighted_mean(lure_weights(q, n), losses), Estimator::r_lure, losses.size(), n};
}

RiskEstimate estimate(Estimator e, std::span<const double> losses, std::span<const double> q, std::size_t n) {
  switch (e) {
    case Estimator::r_tilde: {
      RiskEstimate r = r_tilde(losses);
      r.n = n;
      return r;
    }
    case Estimator::r_pure: return r_pure(losses, q, n);
    case Estimator::r_lure: return r_lure(losses, q, n);
    case Estimator::r_full: throw InvalidArgument("r_full needs the whole pool; use pool_risk");
  }
  return {};
}

}  // namespace evalbench::active
