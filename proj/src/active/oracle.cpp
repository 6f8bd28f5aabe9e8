#include "evalbench/active/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evalbench/numcore/error.hpp"

namespace evalbench::active {

namespace {

// Leaves are kept so the variance can be taken about the mean.
struct Moments {
  double p = 0.0, px = 0.0;
  std::size_t count = 0;
  std::vector<std::pair<double, double>> leaves;  // (probability, value)

  void add(double prob, double x) {
    p += prob;
    px += prob * x;
    leaves.emplace_back(prob, x);
  }
};

void check(std::span<const double> losses, std::size_t m, Estimator e) {
  if (losses.size() > kMaxEnumeratedPool)
    throw InvalidArgument("enumeration is limited to pools of " + std::to_string(kMaxEnumeratedPool) + " points");
  if (m == 0 || m > losses.size()) throw InvalidArgument("enumeration needs 1 <= M <= N");
  if (e == Estimator::r_full) throw InvalidArgument("r_full is not a trajectory estimator");
}

double leaf_value(std::span<const double> losses, const Trajectory& t, Estimator e) {
  const std::vector<double> l = gather(losses, t.indices);
  return estimate(e, l, t.q, losses.size()).value;
}

void visit(std::span<const double> losses, const ProposalRule& rule, std::size_t m, Estimator e,
           std::vector<std::size_t>& remaining, Trajectory& t, double prob, Moments& acc) {
  if (t.size() == m) {
    const double x = leaf_value(losses, t, e);
    acc.add(prob, x);
    ++acc.count;
    return;
  }
  const std::vector<double> masses = rule(t.indices, remaining);
  if (masses.size() != remaining.size()) throw DimensionError("proposal rule returned the wrong number of masses");
  for (std::size_t j = 0; j < remaining.size(); ++j) {
    if (masses[j] <= 0.0) continue;
    const std::size_t idx = remaining[j];
    std::vector<std::size_t> next = remaining;
    next.erase(next.begin() + static_cast<std::ptrdiff_t>(j));
    t.indices.push_back(idx);
    t.q.push_back(masses[j]);
    visit(losses, rule, m, e, next, t, prob * masses[j], acc);
    t.indices.pop_back();
    t.q.pop_back();
  }
}

Enumeration finish(const Moments& a) {
  const double mean = a.px / a.p;
  double var = 0.0;
  for (const auto& [p, x] : a.leaves) var += p * (x - mean) * (x - mean);
  return {mean, var / a.p, a.p, a.count};
}

}  // namespace

Enumeration enumerate_expectation(std::span<const double> pool_losses, const ProposalRule& rule, std::size_t m,
                                  Estimator estimator) {
  check(pool_losses, m, estimator);
  const std::size_t n = pool_losses.size();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<double> first = rule({}, all);
  if (first.size() != n) throw DimensionError("proposal rule returned the wrong number of masses");
  std::vector<Moments> parts(n);
  bool failed = false;
  std::string message;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(n); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    if (first[j] <= 0.0) continue;
    try {
      std::vector<std::size_t> rem = all;
      rem.erase(rem.begin() + jj);
      Trajectory t{{j}, {first[j]}};
      visit(pool_losses, rule, m, estimator, rem, t, first[j], parts[j]);
    } catch (const std::exception& ex) {
#pragma omp critical
      {
        failed = true;
        message = ex.what();
      }
    }
  }
  if (failed) throw InvalidArgument("enumeration failed: " + message);
  Moments total;
  for (const auto& p : parts) {
    total.p += p.p;
    total.px += p.px;
    total.count += p.count;
    total.leaves.insert(total.leaves.end(), p.leaves.begin(), p.leaves.end());
  }
  return finish(total);
}

Enumeration enumerate_expectation_serial(std::span<const double> pool_losses, const ProposalRule& rule,
                                         std::size_t m, Estimator estimator) {
  check(pool_losses, m, estimator);
  const std::size_t n = pool_losses.size();
  // Walk all N! orderings; each ordered M-prefix appears (N - M)! times.
  double repeats = 1.0;
  for (std::size_t k = 2; k <= n - m; ++k) repeats *= static_cast<double>(k);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Moments acc;
  double leaves = 0.0;
  do {
    Trajectory t;
    std::vector<std::size_t> rem(perm.begin(), perm.end());
    std::sort(rem.begin(), rem.end());
    double prob = 1.0;
    for (std::size_t step = 0; step < m && prob > 0.0; ++step) {
      const std::vector<double> masses = rule(t.indices, rem);
      const auto pos = static_cast<std::size_t>(std::find(rem.begin(), rem.end(), perm[step]) - rem.begin());
      prob *= masses[pos];
      t.indices.push_back(perm[step]);
      t.q.push_back(masses[pos]);
      rem.erase(rem.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    if (prob <= 0.0) continue;
    const double x = leaf_value(pool_losses, t, estimator);
    acc.add(prob / repeats, x);
    leaves += 1.0 / repeats;
  } while (std::next_permutation(perm.begin(), perm.end()));
  acc.count = static_cast<std::size_t>(std::llround(leaves));
  return finish(acc);
}

}  // namespace evalbench::active
