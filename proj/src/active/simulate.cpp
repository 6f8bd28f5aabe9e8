#include "evalbench/active/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "evalbench/numcore/error.hpp"
#include "evalbench/stats/stats.hpp"

namespace evalbench::active {

namespace {

constexpr std::uint64_t kTrajectoryStream = 0x74726a;

void check(std::span<const double> losses, std::size_t m, std::size_t trajectories) {
  if (losses.empty()) throw InvalidArgument("empty pool");
  if (m == 0 || m > losses.size()) throw InvalidArgument("trajectory length must lie in [1, N]");
  if (trajectories == 0) throw InvalidArgument("need at least one trajectory");
}

// One trajectory; writes row t of each table.
void run_one(std::span<const double> losses, const ProposalRule& rule, std::size_t m, RngStream rng,
             TrajectoryEstimates& out, std::size_t t) {
  const std::size_t n = losses.size();
  Pool pool(n);
  std::vector<double> l;
  for (std::size_t step = 0; step < m; ++step) {
    const std::vector<double> masses = rule(pool.acquired(), pool.remaining());
    const auto [idx, q] = acquire(pool, masses, rng);
    l.push_back(losses[idx]);
    const auto& qs = pool.trajectory().q;
    out.tilde.at(t, step) = r_tilde(l).value;
    out.pure.at(t, step) = r_pure(l, qs, n).value;
    out.lure.at(t, step) = r_lure(l, qs, n).value;
  }
  std::unordered_set<std::size_t> seen(pool.acquired().begin(), pool.acquired().end());
  if (seen.size() != m) throw NumericError("trajectory acquired a point twice");
}

TrajectoryEstimates make_tables(std::span<const double> losses, std::size_t m, std::size_t trajectories) {
  TrajectoryEstimates out;
  out.tilde = Tensor({trajectories, m});
  out.pure = Tensor({trajectories, m});
  out.lure = Tensor({trajectories, m});
  out.pool_risk = pool_risk(losses);
  return out;
}

}  // namespace

const Tensor& TrajectoryEstimates::get(Estimator e) const {
  switch (e) {
    case Estimator::r_tilde: return tilde;
    case Estimator::r_pure: return pure;
    case Estimator::r_lure: return lure;
    case Estimator::r_full: break;
  }
  throw InvalidArgument("no trajectory table for r_full");
}

TrajectoryEstimates simulate_trajectories(std::span<const double> pool_losses, const ProposalRule& rule, std::size_t m,
                                          std::size_t trajectories, RngStream& rng) {
  check(pool_losses, m, trajectories);
  const RngStream base(rng.next_u64(), kTrajectoryStream);
  TrajectoryEstimates out = make_tables(pool_losses, m, trajectories);
  bool failed = false;
  std::string message;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t tt = 0; tt < static_cast<std::ptrdiff_t>(trajectories); ++tt) {
    const auto t = static_cast<std::size_t>(tt);
    try {
      run_one(pool_losses, rule, m, base.split(t), out, t);
    } catch (const std::exception& ex) {
#pragma omp critical
      {
        failed = true;
        message = ex.what();
      }
    }
  }
  if (failed) throw NumericError("trajectory simulation failed: " + message);
  return out;
}

TrajectoryEstimates simulate_trajectories_serial(std::span<const double> pool_losses, const ProposalRule& rule,
                                                 std::size_t m, std::size_t trajectories, RngStream& rng) {
  check(pool_losses, m, trajectories);
  const RngStream base(rng.next_u64(), kTrajectoryStream);
  TrajectoryEstimates out = make_tables(pool_losses, m, trajectories);
  const std::size_t n = pool_losses.size();
  for (std::size_t t = 0; t < trajectories; ++t) {
    RngStream s = base.split(t);
    Pool pool(n);
    for (std::size_t step = 0; step < m; ++step) acquire(pool, rule(pool.acquired(), pool.remaining()), s);
    const Trajectory& tr = pool.trajectory();
    const std::vector<double> l = gather(pool_losses, tr.indices);
    for (std::size_t k = 1; k <= m; ++k) {
      std::span<const double> lk(l.data(), k), qk(tr.q.data(), k);
      out.tilde.at(t, k - 1) = r_tilde(lk).value;
      out.pure.at(t, k - 1) = r_pure(lk, qk, n).value;
      out.lure.at(t, k - 1) = r_lure(lk, qk, n).value;
    }
  }
  return out;
}

std::vector<BiasCurve> bias_probe(std::span<const double> pool_losses, const ProposalRule& rule, std::size_t m,
                                  std::size_t trajectories, RngStream& rng) {
  const TrajectoryEstimates est = simulate_trajectories(pool_losses, rule, m, trajectories, rng);
  std::vector<BiasCurve> out;
  for (Estimator e : {Estimator::r_tilde, Estimator::r_pure, Estimator::r_lure}) {
    const Tensor& table = est.get(e);
    BiasCurve c{e, {}, {}, {}};
    std::vector<double> col(trajectories);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t t = 0; t < trajectories; ++t) col[t] = table.at(t, k) - est.pool_risk;
      const auto s = stats::summarize(col);
      c.bias.push_back(s.mean);
      c.std_error.push_back(trajectories > 1 ? s.se : 0.0);
      c.variance.push_back(trajectories > 1 ? s.std * s.std : 0.0);
    }
    out.push_back(std::move(c));
  }
  return out;
}

ActiveTestingCurve active_testing_run(std::span<const double> pool_losses, const ProposalRule& rule, std::size_t m,
                                      std::size_t trials, RngStream& rng) {
  const TrajectoryEstimates est = simulate_trajectories(pool_losses, rule, m, trials, rng);
  ActiveTestingCurve out;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> sq(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      const double d = est.lure.at(t, k) - est.pool_risk;
      sq[t] = d * d;
    }
    out.mse.push_back(stats::mean(sq));
    out.median_sq_error.push_back(stats::median(sq));
    out.sq_error.push_back(std::move(sq));
  }
  return out;
}

double overfitting_bias(double pool_risk_of_model, std::span<const double> train_losses, std::span<const double> q,
                        std::size_t n) {
  return pool_risk_of_model - r_lure(train_losses, q, n).value;
}

}  // namespace evalbench::active
