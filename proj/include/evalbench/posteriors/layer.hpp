#pragma once

#include <string>

#include "evalbench/numcore/autodiff.hpp"
#include "evalbench/numcore/rng.hpp"
#include "evalbench/numcore/tensor.hpp"

namespace evalbench::posteriors {

using numcore::RngStream;
using numcore::Tensor;

enum class PosteriorTag { gaussian, radial, truncated, mc_dropout };

struct PosteriorKind {
  PosteriorTag tag = PosteriorTag::gaussian;
  double truncation = 2.0;  // c, truncated only
  double dropout = 0.5;     // p, mc_dropout only

  static PosteriorKind gaussian() { return {PosteriorTag::gaussian}; }
  static PosteriorKind radial() { return {PosteriorTag::radial}; }
  static PosteriorKind truncated(double c) { return {PosteriorTag::truncated, c}; }
  static PosteriorKind mc_dropout(double p) { return {PosteriorTag::mc_dropout, 2.0, p}; }

  /// Throws InvalidArgument for c <= 0 or p outside (0, 1).
  void validate() const;
};

PosteriorKind parse_posterior(const std::string& name);
std::string to_string(PosteriorTag tag);

/// Per-weight (mu, rho) of one affine layer stored as (out, in + 1); the last
/// column is the bias. sigma = softplus(rho).
struct MeanFieldLayer {
  Tensor mu;
  Tensor rho;

  MeanFieldLayer() = default;
  MeanFieldLayer(Tensor mu_, Tensor rho_);

  /// He-scaled means (bias means 0) and constant rho.
  static MeanFieldLayer init(std::size_t out, std::size_t in, RngStream& rng, double rho_init = -6.0);
  /// Layer with the given mean and a constant sigma.
  static MeanFieldLayer with_sigma(Tensor mu, double sigma);

  Tensor sigma() const;
  std::size_t size() const { return mu.size(); }
  std::size_t rows() const { return mu.rows(); }
  std::size_t cols() const { return mu.cols(); }

  void validate() const;
};

}  // namespace evalbench::posteriors
