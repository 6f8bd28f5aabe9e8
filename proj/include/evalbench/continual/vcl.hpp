#pragma once

#include "evalbench/bnn/train.hpp"
#include "evalbench/continual/stream.hpp"

namespace evalbench::continual {

using bnn::BayesianMlp;
using bnn::Prior;
using bnn::TrainConfig;

enum class PriorSource { initial_prior, previous_posterior };

/// Continues training `model` on one task. The KL term uses either the fixed
/// initial prior or a frozen copy of `model` as it stands on entry.
BayesianMlp vcl_step(const BayesianMlp& model, const Dataset& task, PriorSource source, const Prior& initial,
                     const TrainConfig& cfg);

/// Fine-tunes a copy of `model` on the union of the coresets with the KL
/// taken against `model` itself. Returns the copy unchanged when there is
/// nothing to fit.
BayesianMlp coreset_finetune(const BayesianMlp& model, std::span<const Dataset> coresets, const TrainConfig& cfg);

}  // namespace evalbench::continual
