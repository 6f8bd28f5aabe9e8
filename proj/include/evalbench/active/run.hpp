#pragma once

#include <string>
#include <vector>

#include "evalbench/active/estimators.hpp"
#include "evalbench/active/learner.hpp"
#include "evalbench/active/pool.hpp"

namespace evalbench::active {

enum class ProposalKind { uniform, boltzmann, epsilon_greedy, distance_boltzmann };

std::string to_string(ProposalKind k);
ProposalKind parse_proposal(const std::string& name);

struct ProposalSpec {
  ProposalKind kind = ProposalKind::boltzmann;
  double temperature = 1e4;  // boltzmann over model scores
  double epsilon = 0.1;      // epsilon_greedy
  double beta = 1.0;         // distance_boltzmann
};

struct ActiveLearningConfig {
  ProposalSpec proposal;
  std::vector<Estimator> estimators{Estimator::r_tilde, Estimator::r_pure, Estimator::r_lure};
  std::size_t m_max = 30;  // acquisitions after the seed set
  std::size_t start_points = 10;
  std::size_t retrain_every = 3;
  std::size_t checkpoint_every = 3;
  /// Objective of the scoring model; r_lure gives the all-LURE mode.
  Estimator scoring_estimator = Estimator::r_tilde;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CurvePoint {
  Estimator estimator;
  std::size_t m;  // labelled points, seed set included
  double test_loss;
  double test_accuracy;           // NaN for regression
  std::size_t negative_weights;   // count of training weights below zero
};

struct ActiveLearningResult {
  Trajectory trajectory;
  std::vector<CurvePoint> curve;
};

/// Seed set drawn uniformly (its masses are recorded), then one point per
/// step from the proposal. At each checkpoint a fresh model per estimator is
/// fitted on the shared trajectory with that estimator's weights; all fits
/// at one checkpoint share a seed.
ActiveLearningResult active_learning_run(const Learner& learner, const Dataset& pool, const Dataset& test,
                                         const ActiveLearningConfig& cfg);

/// Masses over the pool's remaining points for one step.
std::vector<double> proposal_masses(const ProposalSpec& spec, const Pool& pool, const Dataset& data,
                                    const FittedModel* scorer, RngStream& rng);

}  // namespace evalbench::active
