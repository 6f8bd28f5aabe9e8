#include "evalbench/active/run.hpp"

#include <algorithm>
#include <unordered_set>

#include "evalbench/numcore/error.hpp"
#include "evalbench/stats/stats.hpp"

namespace evalbench::active {

namespace {

constexpr std::uint64_t kAcquireStream = 0x61637175;

std::uint64_t checkpoint_seed(std::uint64_t seed, std::size_t m) {
  return numcore::mix64(seed ^ (0x9e3779b97f4a7c15ULL * (m + 1)));
}

CurvePoint evaluate(const FittedModel& model, const Dataset& test, Estimator e, std::size_t m,
                    std::span<const double> weights) {
  const auto neg = static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w < 0; }));
  return {e, m, stats::mean(model.losses(test)), model.accuracy(test), neg};
}

}  // namespace

std::string to_string(ProposalKind k) {
  switch (k) {
    case ProposalKind::uniform: return "uniform";
    case ProposalKind::boltzmann: return "boltzmann";
    case ProposalKind::epsilon_greedy: return "epsilon_greedy";
    case ProposalKind::distance_boltzmann: return "distance_boltzmann";
  }
  return "?";
}

ProposalKind parse_proposal(const std::string& name) {
  if (name == "uniform") return ProposalKind::uniform;
  if (name == "boltzmann" || name == "bald") return ProposalKind::boltzmann;
  if (name == "epsilon_greedy") return ProposalKind::epsilon_greedy;
  if (name == "distance_boltzmann") return ProposalKind::distance_boltzmann;
  throw InvalidArgument("unknown proposal '" + name + "'");
}

void ActiveLearningConfig::validate() const {
  if (estimators.empty()) throw InvalidArgument("active learning needs at least one estimator");
  if (start_points == 0) throw InvalidArgument("start_points must be positive");
  if (retrain_every == 0 || checkpoint_every == 0) throw InvalidArgument("cadences must be positive");
  if (scoring_estimator == Estimator::r_full) throw InvalidArgument("the scoring model cannot use r_full");
}

std::vector<double> proposal_masses(const ProposalSpec& spec, const Pool& pool, const Dataset& data,
                                    const FittedModel* scorer, RngStream& rng) {
  const auto rem = pool.remaining();
  switch (spec.kind) {
    case ProposalKind::uniform: return std::vector<double>(rem.size(), 1.0 / static_cast<double>(rem.size()));
    case ProposalKind::epsilon_greedy: return epsilon_greedy_proposal(data.x, pool.acquired(), rem, spec.epsilon);
    case ProposalKind::distance_boltzmann:
      return distance_boltzmann_proposal(data.x, pool.acquired(), rem, spec.beta);
    case ProposalKind::boltzmann: {
      if (scorer == nullptr) throw InvalidArgument("Boltzmann proposal needs a scoring model");
      const Tensor xr = numcore::gather_rows(data.x, rem);
      return boltzmann_proposal(scorer->scores(xr, rng), spec.temperature);
    }
  }
  return {};
}

ActiveLearningResult active_learning_run(const Learner& learner, const Dataset& pool_data, const Dataset& test,
                                         const ActiveLearningConfig& cfg) {
  cfg.validate();
  const std::size_t n = pool_data.size();
  if (n <= cfg.start_points + cfg.m_max) throw InvalidArgument("pool must exceed start_points + m_max");
  RngStream rng(cfg.seed, kAcquireStream);
  Pool pool(n);
  for (std::size_t i = 0; i < cfg.start_points; ++i) {
    const auto rem = pool.remaining();
    acquire(pool, std::vector<double>(rem.size(), 1.0 / static_cast<double>(rem.size())), rng);
  }

  ActiveLearningResult result;
  std::unique_ptr<FittedModel> full;
  auto checkpoint = [&](std::size_t m) {
    const Trajectory& t = pool.trajectory();
    const Dataset train = pool_data.subset(t.indices);
    const std::uint64_t seed = checkpoint_seed(cfg.seed, m);
    for (Estimator e : cfg.estimators) {
      if (e == Estimator::r_full) {
        if (!full) full = learner.fit(pool_data, {}, seed);
        result.curve.push_back(evaluate(*full, test, e, m, {}));
        continue;
      }
      const std::vector<double> w = estimator_weights(e, t.q, n);
      result.curve.push_back(evaluate(*learner.fit(train, w, seed), test, e, m, w));
    }
  };

  std::unique_ptr<FittedModel> scorer;
  auto retrain_scorer = [&]() {
    if (cfg.proposal.kind != ProposalKind::boltzmann) return;
    const Trajectory& t = pool.trajectory();
    scorer = learner.fit(pool_data.subset(t.indices), estimator_weights(cfg.scoring_estimator, t.q, n),
                         checkpoint_seed(cfg.seed ^ 0x5c0e, t.size()));
  };

  checkpoint(pool.trajectory().size());
  for (std::size_t step = 0; step < cfg.m_max; ++step) {
    if (step % cfg.retrain_every == 0) retrain_scorer();
    acquire(pool, proposal_masses(cfg.proposal, pool, pool_data, scorer.get(), rng), rng);
    if ((step + 1) % cfg.checkpoint_every == 0 || step + 1 == cfg.m_max) checkpoint(pool.trajectory().size());
  }
  result.trajectory = pool.trajectory();
  std::unordered_set<std::size_t> seen(result.trajectory.indices.begin(), result.trajectory.indices.end());
  if (seen.size() != result.trajectory.size()) throw NumericError("trajectory acquired a point twice");
  return result;
}

}  // namespace evalbench::active
