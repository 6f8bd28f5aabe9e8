#pragma once

#include <span>

#include "evalbench/active/estimators.hpp"
#include "evalbench/active/pool.hpp"

namespace evalbench::active {

inline constexpr std::size_t kMaxEnumeratedPool = 8;

struct Enumeration {
  double mean = 0.0;
  double variance = 0.0;
  double total_probability = 0.0;  // 1 up to rounding
  std::size_t trajectories = 0;
};

/// Exact moments of an estimator over every ordered M-subset of the pool,
/// weighting each path by the product of its proposal masses. Parallel over
/// the first acquired point. Throws for N > kMaxEnumeratedPool or M > N.
Enumeration enumerate_expectation(std::span<const double> pool_losses, const ProposalRule& rule, std::size_t m,
                                  Estimator estimator);
/// Single-threaded depth-first reference.
Enumeration enumerate_expectation_serial(std::span<const double> pool_losses, const ProposalRule& rule, std::size_t m,
                                         Estimator estimator);

}  // namespace evalbench::active
