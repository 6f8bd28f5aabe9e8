#pragma once

#include "evalbench/continual/vcl.hpp"

namespace evalbench::continual {

/// One (diagonal Fisher, anchor) pair per finished task, over the means of
/// every layer.
struct FisherState {
  std::vector<std::vector<Tensor>> fisher;
  std::vector<std::vector<Tensor>> anchors;
  std::size_t tasks() const { return fisher.size(); }
};

/// Mean over examples of the squared per-example gradient of log p(y|x)
/// at the means.
std::vector<Tensor> diagonal_fisher(const BayesianMlp& model, const Dataset& ds,
                                    std::span<const std::size_t> allowed_classes = {});

/// (lambda / 2) sum_t sum_i F_ti (theta_i - theta*_ti)^2 as a training penalty.
std::function<numcore::Var(numcore::Tape&, std::span<const numcore::Var>)> ewc_penalty(const FisherState& state,
                                                                                        double lambda);
double ewc_penalty_value(const FisherState& state, double lambda, const BayesianMlp& model);

struct EwcStep {
  BayesianMlp model;
  FisherState state;
};

/// Trains the means on NLL plus the penalty, then appends this task's Fisher
/// and anchor. cfg.deterministic is forced on.
EwcStep ewc_step(const BayesianMlp& model, const Dataset& task, FisherState state, double lambda, TrainConfig cfg);

}  // namespace evalbench::continual
