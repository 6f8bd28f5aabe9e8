#pragma once

#include <span>
#include <vector>

#include "evalbench/active/estimators.hpp"
#include "evalbench/active/pool.hpp"

namespace evalbench::active {

/// Estimates after each acquisition for many independent trajectories over a
/// labelled pool with fixed per-point losses. Each tensor is (trajectories, M);
/// column m-1 holds the estimate from the first m points.
struct TrajectoryEstimates {
  Tensor tilde, pure, lure;
  double pool_risk = 0.0;

  const Tensor& get(Estimator e) const;
};

/// Trajectory t draws from rng-derived stream t, so results do not depend on
/// the thread count. Checks that no index repeats within a trajectory.
TrajectoryEstimates simulate_trajectories(std::span<const double> pool_losses, const ProposalRule& rule, std::size_t m,
                                          std::size_t trajectories, RngStream& rng);
/// Single-threaded reference with the same draws.
TrajectoryEstimates simulate_trajectories_serial(std::span<const double> pool_losses, const ProposalRule& rule,
                                                 std::size_t m, std::size_t trajectories, RngStream& rng);

struct BiasCurve {
  Estimator estimator;
  std::vector<double> bias;       // mean(estimate_m - pool risk), m = 1..M
  std::vector<double> std_error;  // of that mean
  std::vector<double> variance;   // of the estimate across trajectories
};

/// Bias of each trajectory estimator against the full-pool risk of a fixed model.
std::vector<BiasCurve> bias_probe(std::span<const double> pool_losses, const ProposalRule& rule, std::size_t m,
                                  std::size_t trajectories, RngStream& rng);

struct ActiveTestingCurve {
  std::vector<double> mse;                // mean over trials of (R_lure - r)^2
  std::vector<double> median_sq_error;    // median over trials
  std::vector<std::vector<double>> sq_error;  // [m-1][trial]
};

/// Active testing of a fixed model: LURE estimate of the pool risk as labels
/// are acquired with `rule`, m = 1..M.
ActiveTestingCurve active_testing_run(std::span<const double> pool_losses, const ProposalRule& rule, std::size_t m,
                                      std::size_t trials, RngStream& rng);

/// B_OFB = r - R_LURE(theta*) on the training trajectory.
double overfitting_bias(double pool_risk_of_model, std::span<const double> train_losses, std::span<const double> q,
                        std::size_t n);

}  // namespace evalbench::active
