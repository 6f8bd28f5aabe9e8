#pragma once

#include <functional>
#include <span>
#include <vector>

#include "evalbench/bnn/model.hpp"
#include "evalbench/data/dataset.hpp"
#include "evalbench/numcore/autodiff.hpp"

namespace evalbench::bnn {

using data::Dataset;
using numcore::Tape;
using numcore::Var;

/// negative ELBO = nll + kl_scale * (prior_cross_entropy - entropy)
struct ElboBreakdown {
  double nll = 0.0;
  double prior_cross_entropy = 0.0;  // -E_q[log p(w)]
  double entropy = 0.0;              // H[q]
  double loss = 0.0;
};

/// Noise for one weight draw of one layer: eps (Gaussian/truncated/radial
/// direction), the radial radius, or a dropout row mask.
struct LayerNoise {
  Tensor eps;
  double radius = 0.0;
  Tensor mask;
};

/// draws[s][l] for sample s, layer l.
struct Noise {
  std::vector<std::vector<LayerNoise>> draws;
  std::size_t samples() const { return draws.size(); }
};

Noise draw_noise(const BayesianMlp& model, std::size_t samples, RngStream& rng);

struct ElboOptions {
  double kl_scale = 1.0;
  /// Dataset size used for the N_total / |batch| scaling; 0 means |batch|.
  double n_total = 0.0;
  /// Per-example weights aligned with the batch rows; empty means all ones.
  std::span<const double> weights;
  /// Restricts the softmax to these classes (multi-head protocol).
  std::span<const std::size_t> allowed_classes;
  /// Evaluate at the means, without noise or KL terms.
  bool mean_only = false;
};

/// Parameter leaves and loss nodes recorded on a tape.
struct ElboGraph {
  std::vector<Var> mu;
  std::vector<Var> rho;
  Var nll;
  Var prior_cross_entropy;
  Var entropy;
  Var loss;
  Var kl;  // prior_cross_entropy - entropy
};

/// Builds the negative ELBO with the given frozen noise. Throws
/// InvalidArgument for a radial prior with a non-radial posterior and
/// NumericError naming the offending term when a value is not finite.
ElboGraph build_elbo(Tape& tape, const BayesianMlp& model, const Dataset& batch, const Prior& prior,
                     const Noise& noise, const ElboOptions& opts);

/// Forward value only, drawing `samples` fresh noise draws from `rng`.
ElboBreakdown elbo(const BayesianMlp& model, const Dataset& batch, const Prior& prior, std::size_t samples,
                   const ElboOptions& opts, RngStream& rng);
ElboBreakdown elbo(const BayesianMlp& model, const Dataset& batch, const Prior& prior, const Noise& noise,
                   const ElboOptions& opts);

/// Per-example NLL of one forward pass with explicit weights (n values).
Var per_example_nll(Tape& tape, const BayesianMlp& model, std::span<const Var> weights, const Dataset& batch,
                    std::span<const std::size_t> allowed_classes = {});

/// Flattens (mu, rho) of every layer, mu first per layer.
std::vector<double> flatten_params(const BayesianMlp& model);
void unflatten_params(BayesianMlp& model, std::span<const double> flat);

}  // namespace evalbench::bnn
