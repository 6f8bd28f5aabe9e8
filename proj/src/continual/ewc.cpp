#include "evalbench/continual/ewc.hpp"

#include "evalbench/bnn/elbo.hpp"
#include "evalbench/numcore/error.hpp"

namespace evalbench::continual {

namespace ad = numcore::ad;
using numcore::Tape;
using numcore::Var;

std::vector<Tensor> diagonal_fisher(const BayesianMlp& model, const Dataset& ds,
                                    std::span<const std::size_t> allowed_classes) {
  if (ds.size() == 0) throw InvalidArgument("Fisher of an empty dataset");
  std::vector<Tensor> f;
  for (const auto& l : model.layers) f.push_back(Tensor::zeros_like(l.mu));
  const Prior unused = Prior::isotropic(model);
  bnn::ElboOptions opts;
  opts.mean_only = true;
  opts.n_total = 1.0;
  opts.allowed_classes = allowed_classes;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::size_t row[1] = {i};
    const Dataset one = ds.subset(row);
    Tape tape;
    const bnn::ElboGraph g = bnn::build_elbo(tape, model, one, unused, bnn::Noise{}, opts);
    tape.backward(g.nll);
    for (std::size_t l = 0; l < f.size(); ++l) {
      const auto& grad = g.mu[l].grad();
      for (std::size_t k = 0; k < grad.size(); ++k) f[l][k] += grad[k] * grad[k];
    }
  }
  for (auto& t : f)
    for (auto& v : t.data()) v /= static_cast<double>(ds.size());
  return f;
}

std::function<Var(Tape&, std::span<const Var>)> ewc_penalty(const FisherState& state, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("EWC lambda must be non-negative");
  return [state, lambda](Tape& tape, std::span<const Var> mu) {
    Var total = tape.constant(Tensor({1}, 0.0));
    for (std::size_t t = 0; t < state.tasks(); ++t) {
      for (std::size_t l = 0; l < mu.size(); ++l) {
        Tensor neg = state.anchors[t][l];
        for (auto& v : neg.data()) v = -v;
        const Var d = ad::add_const(mu[l], neg);
        total = ad::add(total, ad::dot_const(ad::square(d), state.fisher[t][l].data()));
      }
    }
    return ad::scale(total, 0.5 * lambda);
  };
}

double ewc_penalty_value(const FisherState& state, double lambda, const BayesianMlp& model) {
  double s = 0.0;
  for (std::size_t t = 0; t < state.tasks(); ++t)
    for (std::size_t l = 0; l < model.layers.size(); ++l)
      for (std::size_t k = 0; k < model.layers[l].mu.size(); ++k) {
        const double d = model.layers[l].mu[k] - state.anchors[t][l][k];
        s += state.fisher[t][l][k] * d * d;
      }
  return 0.5 * lambda * s;
}

EwcStep ewc_step(const BayesianMlp& model, const Dataset& task, FisherState state, double lambda, TrainConfig cfg) {
  cfg.deterministic = true;
  if (state.tasks() > 0) cfg.penalty = ewc_penalty(state, lambda);
  else if (!(lambda >= 0.0)) throw InvalidArgument("EWC lambda must be non-negative");
  bnn::TrainResult r = bnn::train(model, task, Prior::isotropic(model), cfg);
  if (r.diverged) throw NumericError("EWC step diverged");
  state.fisher.push_back(diagonal_fisher(r.model, task, cfg.allowed_classes));
  state.anchors.push_back(r.model.means());
  return {std::move(r.model), std::move(state)};
}

}  // namespace evalbench::continual
