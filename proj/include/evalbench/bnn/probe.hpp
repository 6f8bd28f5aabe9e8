#pragma once

#include <vector>

#include "evalbench/bnn/elbo.hpp"

namespace evalbench::bnn {

/// Spread of single-sample gradient estimates over independent draws.
/// std is sqrt(sum_k |g_k - mean g|^2 / (K - 1)) over all (mu, rho)
/// coordinates; sq_dev holds |g_k - mean g|^2 per probe.
struct TermSpread {
  double std = 0.0;
  std::vector<double> per_layer_std;
  std::vector<double> sq_dev;
  double mean_norm = 0.0;
};

struct GradVarianceReport {
  TermSpread nll;
  TermSpread kl;  // prior cross-entropy minus entropy
};

/// Draws `probes` independent single-sample gradients of the NLL and KL terms
/// (kl_scale 1, dataset scaling off). Accumulation uses Welford updates so
/// identical gradients give exactly zero spread.
GradVarianceReport grad_variance_probe(const BayesianMlp& model, const Dataset& batch, const Prior& prior,
                                       std::size_t probes, RngStream& rng);

/// Gradient of each term w.r.t. the parameters (mu then rho per layer).
struct TermGradients {
  std::vector<std::vector<double>> nll;  // per layer
  std::vector<std::vector<double>> kl;
  ElboBreakdown value;
};

TermGradients term_gradients(const BayesianMlp& model, const Dataset& batch, const Prior& prior, const Noise& noise,
                             const ElboOptions& opts);

}  // namespace evalbench::bnn
