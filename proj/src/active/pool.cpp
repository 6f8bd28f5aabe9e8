#include "evalbench/active/pool.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evalbench/numcore/error.hpp"

namespace evalbench::active {

namespace {

void check_remaining(std::span<const std::size_t> remaining) {
  if (remaining.empty()) throw InvalidArgument("proposal over an empty remaining set");
}

std::vector<double> uniform(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

double row_distance(const Tensor& x, std::size_t a, std::size_t b, bool squared) {
  double d = 0.0;
  for (std::size_t k = 0; k < x.cols(); ++k) {
    const double t = x.at(a, k) - x.at(b, k);
    d += t * t;
  }
  return squared ? d : std::sqrt(d);
}

}  // namespace

Pool::Pool(std::size_t n) : n_(n), remaining_(n) { std::iota(remaining_.begin(), remaining_.end(), 0); }

std::size_t Pool::take(std::size_t pos, double q) {
  if (pos >= remaining_.size()) throw InvalidArgument("acquire position out of range");
  if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("acquired mass must lie in (0, 1]");
  const std::size_t idx = remaining_[pos];
  remaining_.erase(remaining_.begin() + static_cast<std::ptrdiff_t>(pos));
  trajectory_.indices.push_back(idx);
  trajectory_.q.push_back(q);
  return idx;
}

std::vector<double> boltzmann_proposal(std::span<const double> scores, double temperature) {
  if (scores.empty()) throw InvalidArgument("proposal over an empty remaining set");
  if (!(temperature > 0.0)) throw InvalidArgument("Boltzmann temperature must be positive");
  double top = -std::numeric_limits<double>::infinity();
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericError("non-finite acquisition score");
    top = std::max(top, s);
  }
  std::vector<double> p(scores.size());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) z += p[i] = std::exp(temperature * (scores[i] - top));
  for (double& v : p) v /= z;
  return p;
}

std::vector<double> epsilon_greedy_proposal(const Tensor& x, std::span<const std::size_t> acquired,
                                            std::span<const std::size_t> remaining, double epsilon) {
  check_remaining(remaining);
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
  if (acquired.empty()) return uniform(remaining.size());
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t j = 0; j < remaining.size(); ++j) {
    double d = 0.0;
    for (std::size_t k : acquired) d += row_distance(x, k, remaining[j], false);
    if (d > best_d) best_d = d, best = j;
  }
  const double n = static_cast<double>(x.rows());
  std::vector<double> p(remaining.size(), epsilon / n);
  p[best] = 1.0 - epsilon + epsilon / n;
  const double z = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= z;
  return p;
}

std::vector<double> distance_boltzmann_proposal(const Tensor& x, std::span<const std::size_t> acquired,
                                                std::span<const std::size_t> remaining, double beta) {
  check_remaining(remaining);
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  if (acquired.empty()) return uniform(remaining.size());
  std::vector<double> s(remaining.size(), 0.0);
  for (std::size_t j = 0; j < remaining.size(); ++j)
    for (std::size_t k : acquired) s[j] += row_distance(x, k, remaining[j], true);
  const double top = *std::max_element(s.begin(), s.end());
  if (top > 0.0)
    for (double& v : s) v /= top;
  return boltzmann_proposal(s, beta);
}

std::vector<double> proportional_proposal(std::span<const double> scores, double floor) {
  if (scores.empty()) throw InvalidArgument("proposal over an empty remaining set");
  if (!(floor >= 0.0)) throw InvalidArgument("proposal floor must be >= 0");
  std::vector<double> p(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw NumericError("non-finite acquisition score");
    total += p[i] = std::max(scores[i], 0.0);
  }
  if (total == 0.0) return uniform(scores.size());
  const double add = floor * total / static_cast<double>(scores.size());
  double z = 0.0;
  for (double& v : p) z += v += add;
  for (double& v : p) v /= z;
  return p;
}

std::pair<std::size_t, double> acquire(Pool& pool, std::span<const double> masses, RngStream& rng) {
  const auto rem = pool.remaining();
  if (masses.size() != rem.size()) throw DimensionError("masses do not match the remaining set");
  if (rem.size() == 1) return {pool.take(0, 1.0), 1.0};
  const double u = rng.uniform();
  double c = 0.0;
  std::size_t pos = masses.size() - 1;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    c += masses[i];
    if (u < c) {
      pos = i;
      break;
    }
  }
  // Guard against rounding leaving u above the final cumulative mass.
  while (masses[pos] <= 0.0 && pos > 0) --pos;
  const double q = masses[pos];
  return {pool.take(pos, q), q};
}

ProposalRule uniform_rule() {
  return [](std::span<const std::size_t>, std::span<const std::size_t> remaining) {
    check_remaining(remaining);
    return uniform(remaining.size());
  };
}

ProposalRule static_boltzmann_rule(std::vector<double> scores, double temperature) {
  return [scores = std::move(scores), temperature](std::span<const std::size_t>, std::span<const std::size_t> remaining) {
    return boltzmann_proposal(gather(scores, remaining), temperature);
  };
}

ProposalRule static_proportional_rule(std::vector<double> scores, double floor) {
  return [scores = std::move(scores), floor](std::span<const std::size_t>, std::span<const std::size_t> remaining) {
    return proportional_proposal(gather(scores, remaining), floor);
  };
}

ProposalRule epsilon_greedy_rule(Tensor x, double epsilon) {
  return [x = std::move(x), epsilon](std::span<const std::size_t> acquired, std::span<const std::size_t> remaining) {
    return epsilon_greedy_proposal(x, acquired, remaining, epsilon);
  };
}

ProposalRule distance_boltzmann_rule(Tensor x, double beta) {
  return [x = std::move(x), beta](std::span<const std::size_t> acquired, std::span<const std::size_t> remaining) {
    return distance_boltzmann_proposal(x, acquired, remaining, beta);
  };
}

std::vector<double> gather(std::span<const double> values, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= values.size()) throw DimensionError("gather index out of range");
    out[i] = values[idx[i]];
  }
  return out;
}

}  // namespace evalbench::active
