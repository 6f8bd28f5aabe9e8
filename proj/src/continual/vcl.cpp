#include "evalbench/continual/vcl.hpp"

#include "evalbench/numcore/error.hpp"

namespace evalbench::continual {

BayesianMlp vcl_step(const BayesianMlp& model, const Dataset& task, PriorSource source, const Prior& initial,
                     const TrainConfig& cfg) {
  const Prior prior = source == PriorSource::previous_posterior ? Prior::from_posterior(model) : initial;
  if (prior.kind == bnn::PriorKind::radial && model.posterior.tag != posteriors::PosteriorTag::radial)
    throw InvalidArgument("a radial prior needs a radial posterior");
  bnn::TrainResult r = bnn::train(model, task, prior, cfg);
  if (r.diverged) throw NumericError("VCL step diverged");
  return std::move(r.model);
}

BayesianMlp coreset_finetune(const BayesianMlp& model, std::span<const Dataset> coresets, const TrainConfig& cfg) {
  std::vector<Dataset> parts;
  for (const auto& c : coresets)
    if (c.size() > 0) parts.push_back(c);
  if (parts.empty()) return model;
  const Dataset all = data::concat(parts);
  bnn::TrainResult r = bnn::train(model, all, Prior::from_posterior(model), cfg);
  if (r.diverged) throw NumericError("coreset fine-tuning diverged");
  return std::move(r.model);
}

}  // namespace evalbench::continual
