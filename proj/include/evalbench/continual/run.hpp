#pragma once

#include "evalbench/continual/evaluate.hpp"
#include "evalbench/continual/ewc.hpp"

namespace evalbench::continual {

/// vcl: previous posterior as prior. vcl_coreset: same on the task minus a
/// k-center coreset, with coreset fine-tuning before every evaluation.
/// coreset_only: initial prior at every task plus coreset fine-tuning.
/// ewc: deterministic means with the quadratic penalty.
enum class Method { vcl, vcl_coreset, coreset_only, ewc };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct ContinualConfig {
  Method method = Method::vcl;
  Protocol protocol = Protocol::single_head;
  std::vector<std::size_t> hidden{32, 32};
  posteriors::PosteriorKind posterior = posteriors::PosteriorKind::gaussian();
  numcore::Activation activation = numcore::Activation::relu();
  double prior_sigma = 1.0;
  double rho_init = -3.0;
  TrainConfig train;
  TrainConfig finetune;  // epochs default to 20 via default_config()
  std::size_t coreset_size = 40;
  double ewc_lambda = 100.0;
  std::size_t test_samples = 10;
  std::size_t probes = 10;  // gradient-ratio probes at each task boundary (0 = off)
  std::size_t probe_warmup_epochs = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Desk-scale defaults: 40 epochs at lr 3e-3 per task, 20 fine-tuning epochs.
ContinualConfig default_config();

struct ContinualResult {
  AccuracyMatrix accuracy;
  std::vector<double> average;  // mean of each accuracy row
  /// Entries t = 0..T-2: probes on task t+1 right after training task t. The
  /// gradient ratio is taken after probe_warmup_epochs on task t+1, on a copy.
  std::vector<double> boundary_entropy;
  std::vector<GradientRatio> gradient_ratio;  // empty for ewc
};

ContinualResult run_continual(const TaskStream& stream, const ContinualConfig& cfg);

/// Model shaped for the stream with the config's initialisation.
BayesianMlp initial_model(const TaskStream& stream, const ContinualConfig& cfg);

}  // namespace evalbench::continual
