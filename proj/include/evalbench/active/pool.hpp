#pragma once

#include <functional>
#include <span>
#include <vector>

#include "evalbench/numcore/rng.hpp"
#include "evalbench/numcore/tensor.hpp"

namespace evalbench::active {

using numcore::RngStream;
using numcore::Tensor;

/// Acquired indices in order, with the proposal mass each had when drawn.
struct Trajectory {
  std::vector<std::size_t> indices;
  std::vector<double> q;

  std::size_t size() const { return indices.size(); }
};

/// Index bookkeeping for sampling without replacement from N points.
class Pool {
 public:
  explicit Pool(std::size_t n);

  std::size_t size() const { return n_; }
  std::span<const std::size_t> acquired() const { return trajectory_.indices; }
  /// Remaining indices in increasing order.
  std::span<const std::size_t> remaining() const { return remaining_; }
  const Trajectory& trajectory() const { return trajectory_; }

  /// Moves remaining()[pos] to the acquired list with mass q.
  std::size_t take(std::size_t pos, double q);

 private:
  std::size_t n_;
  std::vector<std::size_t> remaining_;
  Trajectory trajectory_;
};

/// Masses over `remaining` (same order) given the acquired history.
/// Implementations must be pure: the enumeration oracle calls them from
/// several threads.
using ProposalRule =
    std::function<std::vector<double>(std::span<const std::size_t> acquired, std::span<const std::size_t> remaining)>;

/// softmax(T s) with a max shift. Throws on an empty set, T <= 0, or a
/// non-finite score.
std::vector<double> boltzmann_proposal(std::span<const double> scores, double temperature);

/// Total distance from each candidate to the acquired points; the maximiser
/// (lowest index on ties) gets 1 - eps + eps / N, the rest eps / N, with N
/// the full pool size, then the masses are renormalised over the remaining
/// set. Uniform when nothing is acquired.
std::vector<double> epsilon_greedy_proposal(const Tensor& x, std::span<const std::size_t> acquired,
                                            std::span<const std::size_t> remaining, double epsilon);

/// Squared distance to the acquired points, divided by its maximum, then a
/// Boltzmann distribution with inverse temperature beta. Uniform when nothing
/// is acquired.
std::vector<double> distance_boltzmann_proposal(const Tensor& x, std::span<const std::size_t> acquired,
                                                std::span<const std::size_t> remaining, double beta = 1.0);

/// Masses proportional to max(s, 0) + floor * mean(max(s, 0)) over the
/// remaining set; uniform when every score is zero.
std::vector<double> proportional_proposal(std::span<const double> scores, double floor);

/// Draws one remaining point by inverse CDF, records it, and returns
/// (pool index, mass).
std::pair<std::size_t, double> acquire(Pool& pool, std::span<const double> masses, RngStream& rng);

/// Rules over fixed per-point values (indexed by pool index).
ProposalRule uniform_rule();
ProposalRule static_boltzmann_rule(std::vector<double> scores, double temperature);
ProposalRule static_proportional_rule(std::vector<double> scores, double floor);
ProposalRule epsilon_greedy_rule(Tensor x, double epsilon);
ProposalRule distance_boltzmann_rule(Tensor x, double beta = 1.0);

/// Values at the given pool indices.
std::vector<double> gather(std::span<const double> values, std::span<const std::size_t> idx);

}  // namespace evalbench::active
