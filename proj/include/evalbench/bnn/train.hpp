#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "evalbench/bnn/elbo.hpp"

namespace evalbench::bnn {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::size_t train_samples = 1;  // S_train
  std::size_t test_samples = 10;  // S_test, used for validation NLL
  double kl_scale = 1.0;
  std::size_t mean_pretrain_epochs = 0;
  std::size_t patience = 20;
  bool amsgrad = false;
  std::uint64_t seed = 0;
  /// Restricts the softmax during training (multi-head protocol).
  std::vector<std::size_t> allowed_classes;
  /// Extra scalar added to every minibatch loss, built from the mean leaves
  /// (used by EWC). Receives the tape and the mu leaves.
  std::function<Var(Tape&, std::span<const Var>)> penalty;
  /// Train the means only, never touching rho and never sampling.
  bool deterministic = false;

  void validate() const;
};

struct EpochRecord {
  ElboBreakdown train;  // averaged over minibatches
  double val_nll = 0.0;  // NaN when no validation set
};

struct TrainResult {
  BayesianMlp model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool diverged = false;
};

/// Adam on the negative ELBO. `weights` are per-example NLL weights aligned
/// with the dataset rows (empty = all ones). Early stopping on `val` NLL
/// restores the best epoch's parameters. Deterministic given cfg.seed.
TrainResult train(const BayesianMlp& model, const Dataset& dataset, const Prior& prior, const TrainConfig& cfg,
                  std::span<const double> weights = {}, const Dataset* val = nullptr);

/// Adam state over a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t n, double lr, bool amsgrad);
  /// Entries flagged in `frozen` (when given) are left untouched.
  void step(std::span<double> params, std::span<const double> grads, const std::vector<bool>* frozen = nullptr);

 private:
  double lr_;
  bool amsgrad_;
  std::size_t t_ = 0;
  std::vector<double> m_, v_, vmax_;
};

}  // namespace evalbench::bnn
