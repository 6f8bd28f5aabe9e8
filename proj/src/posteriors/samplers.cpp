#include "evalbench/posteriors/samplers.hpp"

#include <cmath>
#include <numbers>

#include "evalbench/numcore/autodiff.hpp"
#include "evalbench/numcore/error.hpp"

namespace evalbench::posteriors {

namespace {

double norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

Tensor apply_gaussian(const MeanFieldLayer& layer, const Tensor& eps) {
  numcore::require_same_shape(layer.mu, eps, "apply_gaussian");
  Tensor w = layer.mu;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += numcore::softplus(layer.rho[i]) * eps[i];
  return w;
}

Tensor apply_radial(const MeanFieldLayer& layer, const Tensor& eps, double radius) {
  numcore::require_same_shape(layer.mu, eps, "apply_radial");
  const double n = norm(eps);
  if (!(n > 0.0)) throw NumericError("apply_radial: zero noise direction");
  Tensor w = layer.mu;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += numcore::softplus(layer.rho[i]) * eps[i] / n * radius;
  return w;
}

WeightSample sample_gaussian(const MeanFieldLayer& layer, RngStream& rng) {
  WeightSample s;
  s.noise.kind = PosteriorTag::gaussian;
  s.noise.eps = numcore::gaussian(rng, layer.size()).reshaped(layer.mu.shape());
  s.values = apply_gaussian(layer, s.noise.eps);
  return s;
}

WeightSample sample_radial(const MeanFieldLayer& layer, RngStream& rng) {
  WeightSample s;
  s.noise.kind = PosteriorTag::radial;
  do {
    s.noise.eps = numcore::gaussian(rng, layer.size()).reshaped(layer.mu.shape());
  } while (norm(s.noise.eps) == 0.0);
  s.noise.radius = std::abs(rng.normal());
  s.values = apply_radial(layer, s.noise.eps, s.noise.radius);
  return s;
}

WeightSample sample_truncated(const MeanFieldLayer& layer, RngStream& rng, double c) {
  if (!(c > 0.0)) throw InvalidArgument("sample_truncated: c must be > 0");
  WeightSample s;
  s.noise.kind = PosteriorTag::truncated;
  s.noise.eps = Tensor(layer.mu.shape());
  for (auto& e : s.noise.eps.data()) {
    double v = rng.normal();
    while (std::abs(v) > c) {
      v = rng.normal();
      ++s.noise.rejections;
    }
    e = v;
  }
  s.values = apply_gaussian(layer, s.noise.eps);
  return s;
}

WeightSample sample(const MeanFieldLayer& layer, const PosteriorKind& kind, RngStream& rng) {
  switch (kind.tag) {
    case PosteriorTag::gaussian: return sample_gaussian(layer, rng);
    case PosteriorTag::radial: return sample_radial(layer, rng);
    case PosteriorTag::truncated: return sample_truncated(layer, rng, kind.truncation);
    case PosteriorTag::mc_dropout: break;
  }
  throw InvalidArgument("sample: mc_dropout has no mean-field sampler");
}

Tensor dropout_masks(std::size_t rows, RngStream& rng, double p, std::size_t k) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("dropout rate must lie in (0, 1)");
  if (k == 0) throw InvalidArgument("dropout needs at least one mask");
  Tensor m({k, rows});
  const double keep = 1.0 / (1.0 - p);
  for (auto& v : m.data()) v = rng.bernoulli(p) ? 0.0 : keep;
  return m;
}

std::vector<WeightSample> sample_mc_dropout(const Tensor& weights, RngStream& rng, double p, std::size_t k) {
  const Tensor masks = dropout_masks(weights.rows(), rng, p, k);
  std::vector<WeightSample> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    WeightSample s;
    s.noise.kind = PosteriorTag::mc_dropout;
    s.noise.eps = Tensor::vector(std::vector<double>(masks.row(i).begin(), masks.row(i).end()));
    s.values = weights;
    for (std::size_t r = 0; r < weights.rows(); ++r) {
      for (auto& v : s.values.row(r)) v *= masks.at(i, r);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double truncated_variance_factor(double c) {
  const double phi = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
  const double z = std::erf(c / std::numbers::sqrt2);
  return 1.0 - 2.0 * c * phi / z;
}

}  // namespace evalbench::posteriors
