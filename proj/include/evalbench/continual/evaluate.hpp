#pragma once

#include <string>

#include "evalbench/bnn/model.hpp"
#include "evalbench/bnn/probe.hpp"
#include "evalbench/continual/stream.hpp"

namespace evalbench::continual {

enum class Protocol { single_head, multi_head, test_time_knowledge };

std::string to_string(Protocol p);
Protocol parse_protocol(const std::string& name);

/// Multi-head restricts the softmax to the task's classes while training.
bool trains_restricted(Protocol p);
/// Multi-head and test-time-knowledge renormalise over the task's classes
/// before the argmax.
bool tests_restricted(Protocol p);

/// Row t holds accuracies on tasks 0..t after training through task t.
using AccuracyMatrix = std::vector<std::vector<double>>;

/// Accuracy on the test sets of tasks 0..t. samples == 0 evaluates at the means.
std::vector<double> evaluate_row(const bnn::BayesianMlp& model, const TaskStream& stream, std::size_t t,
                                 Protocol protocol, std::size_t samples, RngStream& rng);
double average(std::span<const double> row);

/// Mean predictive entropy of the S-sample mean prediction.
double boundary_entropy(const bnn::BayesianMlp& model, const Dataset& test, std::size_t samples, RngStream& rng);

/// Final-layer gradient norms of the NLL and of the prior term (cross-entropy
/// minus entropy), averaged over probes with fresh weight noise.
struct GradientRatio {
  double nll_norm = 0.0;
  double prior_norm = 0.0;
  double nll_std = 0.0;  // spread of the NLL norm across probes
  double ratio() const { return nll_norm / prior_norm; }
};
GradientRatio gradient_ratio_probe(const bnn::BayesianMlp& model, const Dataset& batch, const bnn::Prior& prior,
                                   std::size_t probes, double n_total, RngStream& rng);

}  // namespace evalbench::continual
