#include "evalbench/bnn/probe.hpp"

#include <cmath>

#include "evalbench/numcore/error.hpp"

namespace evalbench::bnn {

namespace {

std::vector<std::vector<double>> layer_grads(const ElboGraph& g) {
  std::vector<std::vector<double>> out;
  for (std::size_t l = 0; l < g.mu.size(); ++l) {
    std::vector<double> v(g.mu[l].grad().data().begin(), g.mu[l].grad().data().end());
    v.insert(v.end(), g.rho[l].grad().data().begin(), g.rho[l].grad().data().end());
    out.push_back(std::move(v));
  }
  return out;
}

class Welford {
 public:
  void add(const std::vector<std::vector<double>>& g) {
    if (mean_.empty()) {
      mean_.resize(g.size());
      m2_.assign(g.size(), 0.0);
      for (std::size_t l = 0; l < g.size(); ++l) mean_[l].assign(g[l].size(), 0.0);
    }
    ++k_;
    double norm2 = 0.0;
    for (std::size_t l = 0; l < g.size(); ++l) {
      for (std::size_t i = 0; i < g[l].size(); ++i) {
        const double delta = g[l][i] - mean_[l][i];
        mean_[l][i] += delta / static_cast<double>(k_);
        m2_[l] += delta * (g[l][i] - mean_[l][i]);
        norm2 += g[l][i] * g[l][i];
      }
    }
    norm_sum_ += std::sqrt(norm2);
    history_.push_back(g);
  }

  TermSpread finish() const {
    TermSpread t;
    double total = 0.0;
    for (double m : m2_) {
      t.per_layer_std.push_back(std::sqrt(m / static_cast<double>(k_ - 1)));
      total += m;
    }
    t.std = std::sqrt(total / static_cast<double>(k_ - 1));
    t.mean_norm = norm_sum_ / static_cast<double>(k_);
    for (const auto& g : history_) {
      double d = 0.0;
      for (std::size_t l = 0; l < g.size(); ++l)
        for (std::size_t i = 0; i < g[l].size(); ++i) d += (g[l][i] - mean_[l][i]) * (g[l][i] - mean_[l][i]);
      t.sq_dev.push_back(d);
    }
    return t;
  }

 private:
  std::size_t k_ = 0;
  std::vector<std::vector<double>> mean_;
  std::vector<double> m2_;
  double norm_sum_ = 0.0;
  std::vector<std::vector<std::vector<double>>> history_;
};

}  // namespace

TermGradients term_gradients(const BayesianMlp& model, const Dataset& batch, const Prior& prior, const Noise& noise,
                             const ElboOptions& opts) {
  TermGradients out;
  Tape tape;
  ElboGraph g = build_elbo(tape, model, batch, prior, noise, opts);
  out.value = {g.nll.value().item(), g.prior_cross_entropy.value().item(), g.entropy.value().item(), g.loss.value().item()};
  tape.backward(g.nll);
  out.nll = layer_grads(g);
  tape.backward(g.kl);
  out.kl = layer_grads(g);
  return out;
}

GradVarianceReport grad_variance_probe(const BayesianMlp& model, const Dataset& batch, const Prior& prior,
                                       std::size_t probes, RngStream& rng) {
  if (probes < 2) throw InvalidArgument("grad_variance_probe needs at least two probes");
  Welford nll, kl;
  ElboOptions opts;
  for (std::size_t k = 0; k < probes; ++k) {
    Noise noise = draw_noise(model, 1, rng);
    TermGradients tg = term_gradients(model, batch, prior, noise, opts);
    nll.add(tg.nll);
    kl.add(tg.kl);
  }
  return {nll.finish(), kl.finish()};
}

}  // namespace evalbench::bnn
