#pragma once

#include <memory>
#include <string>
#include <vector>

#include "evalbench/active/learner.hpp"
#include "evalbench/active/simulate.hpp"
#include "evalbench/cli/config.hpp"
#include "evalbench/cli/records.hpp"
#include "evalbench/continual/run.hpp"

namespace evalbench::cli {

using data::Dataset;

struct DataPair {
  Dataset train;
  Dataset test;
};

/// Train/test split for a run seed. Synthetic sets draw from
/// RngStream(seed, "data"); prototype_blobs shares prototypes between the two
/// (prototype_seed + seed). mnist reads IDX files from EVALBENCH_DATA_DIR.
DataPair make_dataset(const DatasetSpec& spec, std::uint64_t seed);

bnn::TrainConfig train_config(const ModelSpec& m);
bnn::PosteriorKind posterior_kind(const ModelSpec& m);
numcore::Activation activation(const ModelSpec& m);
active::BnnSpec bnn_spec(const ModelSpec& m);
std::unique_ptr<active::Learner> make_learner(const ModelSpec& m);

continual::ContinualConfig continual_config(const RunConfig& cfg, std::uint64_t seed, const std::string& method,
                                            const std::string& protocol);
continual::TaskStream make_stream(const RunConfig& cfg, std::uint64_t seed);

/// Fixed model of an active-test / bias / ofb cell: fitted on the train split.
struct FixedModel {
  std::unique_ptr<active::FittedModel> model;
  std::vector<double> pool_losses;  // on the test split
  std::vector<double> pool_scores;  // acquisition scores on the test split
};
FixedModel fit_fixed_model(const RunConfig& cfg, const DataPair& data, std::uint64_t seed);

/// Rule over the test pool for a bias-probe / active-test proposal name.
active::ProposalRule make_rule(const RunConfig& cfg, const std::string& proposal, const DataPair& data,
                               const FixedModel& fixed, std::uint64_t seed);

active::ActiveTestingCurve active_test_curve(const RunConfig& cfg, std::uint64_t seed, const std::string& proposal);
std::vector<active::BiasCurve> bias_curves(const RunConfig& cfg, std::uint64_t seed, const std::string& proposal);

/// Overfitting bias r - R_LURE(theta*) of a model trained with the plain
/// objective on an actively acquired set, and active-learning bias
/// r_test - E[R_tilde] of that same fixed model when its own BALD-Boltzmann
/// proposal picks M points from the held-out pool.
struct OfbAlb {
  double pool_risk = 0.0;   // theta* over the whole training pool
  double train_tilde = 0.0; // plain mean of theta*'s training losses
  double train_lure = 0.0;
  double ofb = 0.0;
  double test_risk = 0.0;
  double alb = 0.0;
  double alb_se = 0.0;
  std::size_t m = 0;
};
OfbAlb ofb_alb_probe(const RunConfig& cfg, std::uint64_t seed);

/// All records of one (seed, method) cell.
std::vector<ExperimentRecord> run_cell(const RunConfig& cfg, std::uint64_t seed, const std::string& method);

}  // namespace evalbench::cli
