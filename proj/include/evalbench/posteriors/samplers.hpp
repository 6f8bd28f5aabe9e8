#pragma once

#include <vector>

#include "evalbench/posteriors/layer.hpp"

namespace evalbench::posteriors {

/// Noise that produced a sample. For radial draws `radius` is r >= 0 and
/// `eps` the unnormalised direction; `rejections` counts truncated redraws.
struct NoiseRecord {
  PosteriorTag kind = PosteriorTag::gaussian;
  Tensor eps;
  double radius = 0.0;
  std::size_t rejections = 0;
};

struct WeightSample {
  Tensor values;
  NoiseRecord noise;
};

WeightSample sample_gaussian(const MeanFieldLayer& layer, RngStream& rng);
WeightSample sample_radial(const MeanFieldLayer& layer, RngStream& rng);
WeightSample sample_truncated(const MeanFieldLayer& layer, RngStream& rng, double c);
WeightSample sample(const MeanFieldLayer& layer, const PosteriorKind& kind, RngStream& rng);

/// Deterministic maps from recorded noise, w = mu + sigma * eps and
/// w = mu + sigma * eps / |eps| * r.
Tensor apply_gaussian(const MeanFieldLayer& layer, const Tensor& eps);
Tensor apply_radial(const MeanFieldLayer& layer, const Tensor& eps, double radius);

/// K dropout samples of a deterministic (out, in + 1) weight matrix. Each
/// mask zeroes whole rows (output units) with probability p and scales the
/// kept rows by 1 / (1 - p). Masks are drawn once, in order, from `rng`.
std::vector<WeightSample> sample_mc_dropout(const Tensor& weights, RngStream& rng, double p, std::size_t k);

/// Row masks only (entries 0 or 1 / (1 - p)), shape (k, rows).
Tensor dropout_masks(std::size_t rows, RngStream& rng, double p, std::size_t k);

/// Var(eps) of a standard normal truncated to [-c, c].
double truncated_variance_factor(double c);

}  // namespace evalbench::posteriors
