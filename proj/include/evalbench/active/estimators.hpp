#pragma once

#include <span>
#include <string>
#include <vector>

namespace evalbench::active {

/// r_tilde: plain mean over acquired points. r_pure / r_lure: unbiased
/// importance-weighted estimators. r_full: mean over the whole pool.
enum class Estimator { r_tilde, r_pure, r_lure, r_full };

std::string to_string(Estimator e);
Estimator parse_estimator(const std::string& name);

struct RiskEstimate {
  double value = 0.0;
  Estimator tag = Estimator::r_tilde;
  std::size_t m = 0;  // points used
  std::size_t n = 0;  // pool size
};

/// Correctly rounded mean of every pool loss.
double pool_risk(std::span<const double> losses);

/// Losses and masses are in acquisition order; q[m] is the proposal mass of
/// the m-th acquired point at the time it was drawn.
RiskEstimate r_tilde(std::span<const double> losses);
RiskEstimate r_pure(std::span<const double> losses, std::span<const double> q, std::size_t n);
RiskEstimate r_lure(std::span<const double> losses, std::span<const double> q, std::size_t n);

/// v_m with r_lure = mean(v_m L_m). A mass within a few ulp of 1/(N-m+1)
/// counts as uniform, so a uniform proposal gives weights of exactly 1.
std::vector<double> lure_weights(std::span<const double> q, std::size_t n);
/// w_t with r_pure = mean(w_t L_t).
std::vector<double> pure_weights(std::span<const double> q, std::size_t n);
/// Per-example training weights for an estimator; all ones for r_tilde.
std::vector<double> estimator_weights(Estimator e, std::span<const double> q, std::size_t n);

RiskEstimate estimate(Estimator e, std::span<const double> losses, std::span<const double> q, std::size_t n);

}  // namespace evalbench::active
