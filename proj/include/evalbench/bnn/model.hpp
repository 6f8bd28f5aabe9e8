#pragma once

#include <vector>

#include "evalbench/numcore/mlp.hpp"
#include "evalbench/posteriors/layer.hpp"

namespace evalbench::bnn {

using numcore::Activation;
using numcore::RngStream;
using numcore::Tensor;
using posteriors::MeanFieldLayer;
using posteriors::PosteriorKind;
using posteriors::PosteriorTag;

enum class HeadKind { classifier, regressor };

struct Head {
  HeadKind kind = HeadKind::classifier;
  double sigma_obs = 0.1;  // regression only

  static Head classifier() { return {HeadKind::classifier, 0.1}; }
  static Head regressor(double sigma_obs = 0.1) { return {HeadKind::regressor, sigma_obs}; }
};

/// Stack of mean-field layers. For mc_dropout the means are the
/// deterministic weights and rho is unused.
struct BayesianMlp {
  std::vector<MeanFieldLayer> layers;
  PosteriorKind posterior;
  Activation activation = Activation::relu();
  Head head;

  /// widths = {in, hidden..., out}.
  static BayesianMlp create(const std::vector<std::size_t>& widths, PosteriorKind posterior, Activation activation,
                            Head head, RngStream& rng, double rho_init = -6.0);

  std::size_t in_dim() const { return layers.front().cols() - 1; }
  std::size_t out_dim() const { return layers.back().rows(); }
  std::size_t num_weights() const;
  std::vector<Tensor> means() const;

  /// Throws on broken chains, invalid posterior settings or sigma_obs <= 0.
  void validate() const;
};

enum class PriorKind { gaussian, radial };

/// Per-weight prior parameters. A radial prior reads (mu, sigma) of each
/// layer as the location/scale of a radial distribution over that layer.
struct Prior {
  PriorKind kind = PriorKind::gaussian;
  std::vector<MeanFieldLayer> layers;

  /// Zero-mean prior with constant sigma, shaped like `model`.
  static Prior isotropic(const BayesianMlp& model, double sigma = 1.0, PriorKind kind = PriorKind::gaussian);
  /// Frozen copy of the model's current variational distribution.
  static Prior from_posterior(const BayesianMlp& model);
};

}  // namespace evalbench::bnn
