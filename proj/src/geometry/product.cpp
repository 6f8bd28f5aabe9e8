#include "evalbench/geometry/product.hpp"

#include <cmath>

#include "evalbench/numcore/error.hpp"

namespace evalbench::geometry {

namespace {

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw DimensionError("product matrix: inner dimensions differ");
  Tensor out({a.rows(), b.cols()}, 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = a.at(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) += v * b.at(k, j);
    }
  return out;
}

constexpr std::uint64_t kMcStream = 0x67656f6d;

Tensor sample_unchecked(const LayerStack& stack, RngStream& rng) {
  Tensor m = sample_layer(stack.layers[0], rng);
  for (std::size_t l = 1; l < stack.layers.size(); ++l) m = matmul(sample_layer(stack.layers[l], rng), m);
  return m;
}

// Writes one product-matrix draw into `out` (row-major, rows * cols values).
void draw_into(const LayerStack& stack, RngStream& rng, std::span<double> out) {
  Tensor m = sample_unchecked(stack, rng);
  std::copy(m.data().begin(), m.data().end(), out.begin());
}

std::size_t chunk_count(std::size_t samples) { return (samples + kMcChunk - 1) / kMcChunk; }

std::size_t chunk_len(std::size_t samples, std::size_t k) { return std::min(kMcChunk, samples - k * kMcChunk); }

}  // namespace

std::size_t LayerStack::rows() const {
  if (layers.empty()) throw InvalidArgument("empty layer stack");
  return layers.back().mean.rows();
}

std::size_t LayerStack::cols() const {
  if (layers.empty()) throw InvalidArgument("empty layer stack");
  return layers.front().mean.cols();
}

void LayerStack::validate() const {
  if (layers.empty()) throw InvalidArgument("empty layer stack");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.mean.rank() != 2 || !layer.mean.same_shape(layer.std))
      throw DimensionError("stack layer " + std::to_string(l) + ": mean and std shapes differ");
    if (l > 0 && layers[l - 1].mean.rows() != layer.mean.cols())
      throw DimensionError("stack layer " + std::to_string(l) + " does not chain");
    for (double s : layer.std.data())
      if (!(s >= 0.0)) throw InvalidArgument("stack std entries must be >= 0");
  }
}

LayerStack LayerStack::random(const std::vector<std::size_t>& widths, RngStream& rng, double std_scale) {
  if (widths.size() < 2) throw InvalidArgument("random stack needs at least two widths");
  LayerStack s;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    StackLayer layer{Tensor({widths[l + 1], widths[l]}), Tensor({widths[l + 1], widths[l]})};
    for (auto& v : layer.mean.data()) v = rng.normal();
    for (auto& v : layer.std.data()) v = std_scale * (0.2 + rng.uniform());
    s.layers.push_back(std::move(layer));
  }
  return s;
}

CovarianceTable::CovarianceTable(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), v_(rows * cols * rows * cols, 0.0) {}

Tensor sample_layer(const StackLayer& layer, RngStream& rng) {
  Tensor w = layer.mean;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += layer.std[i] * rng.normal();
  return w;
}

Tensor product_matrix_sample(const LayerStack& stack, RngStream& rng) {
  stack.validate();
  return sample_unchecked(stack, rng);
}

Tensor product_mean(const LayerStack& stack) {
  stack.validate();
  Tensor m = stack.layers[0].mean;
  for (std::size_t l = 1; l < stack.layers.size(); ++l) m = matmul(stack.layers[l].mean, m);
  return m;
}

CovarianceTable analytic_cov_two_layer(const LayerStack& stack) {
  stack.validate();
  if (stack.layers.size() != 2) throw InvalidArgument("analytic_cov_two_layer needs exactly two layers");
  const StackLayer& w1 = stack.layers[0];
  const StackLayer& w2 = stack.layers[1];
  const std::size_t r = w2.mean.rows(), k = w2.mean.cols(), c = w1.mean.cols();
  CovarianceTable t(r, c);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < c; ++b)
      for (std::size_t cc = 0; cc < r; ++cc)
        for (std::size_t d = 0; d < c; ++d) {
          double v = 0.0;
          for (std::size_t i = 0; i < k; ++i) {
            const double var2 = w2.std.at(a, i) * w2.std.at(a, i);
            const double var1 = w1.std.at(i, b) * w1.std.at(i, b);
            if (a == cc && b == d) v += var2 * var1;
            if (b == d) v += w2.mean.at(a, i) * w2.mean.at(cc, i) * var1;
            if (a == cc) v += w1.mean.at(i, b) * w1.mean.at(i, d) * var2;
          }
          t(a, b, cc, d) = v;
        }
  return t;
}

CovarianceTable single_layer_cov(const StackLayer& layer) {
  const std::size_t r = layer.mean.rows(), c = layer.mean.cols();
  CovarianceTable t(r, c);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < c; ++b) t(a, b, a, b) = layer.std.at(a, b) * layer.std.at(a, b);
  return t;
}

CovarianceTable recursive_step(const CovarianceTable& prev, const Tensor& prev_mean, const StackLayer& layer) {
  const std::size_t r = layer.mean.rows(), k = layer.mean.cols(), c = prev.cols();
  if (prev.rows() != k || prev_mean.rows() != k || prev_mean.cols() != c)
    throw DimensionError("recursive_step: layer does not chain with the previous product");
  // t[a, b, j, d] = sum_i mu_ai prev[i, b, j, d]
  std::vector<double> t(r * c * k * c, 0.0);
  auto ti = [&](std::size_t a, std::size_t b, std::size_t j, std::size_t d) { return ((a * c + b) * k + j) * c + d; };
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t i = 0; i < k; ++i) {
      const double mu = layer.mean.at(a, i);
      if (mu == 0.0) continue;
      for (std::size_t b = 0; b < c; ++b)
        for (std::size_t j = 0; j < k; ++j)
          for (std::size_t d = 0; d < c; ++d) t[ti(a, b, j, d)] += mu * prev(i, b, j, d);
    }
  CovarianceTable out(r, c);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < c; ++b)
      for (std::size_t cc = 0; cc < r; ++cc)
        for (std::size_t d = 0; d < c; ++d) {
          double v = 0.0;
          for (std::size_t j = 0; j < k; ++j) v += layer.mean.at(cc, j) * t[ti(a, b, j, d)];
          if (a == cc) {
            for (std::size_t i = 0; i < k; ++i) {
              const double var = layer.std.at(a, i) * layer.std.at(a, i);
              v += var * (prev(i, b, i, d) + prev_mean.at(i, b) * prev_mean.at(i, d));
            }
          }
          out(a, b, cc, d) = v;
        }
  return out;
}

CovarianceTable analytic_cov_recursive(const LayerStack& stack) {
  stack.validate();
  if (stack.layers.size() < 2) throw InvalidArgument("analytic_cov_recursive needs at least two layers");
  LayerStack first{{stack.layers[0], stack.layers[1]}};
  CovarianceTable cov = analytic_cov_two_layer(first);
  Tensor mean = product_mean(first);
  for (std::size_t l = 2; l < stack.layers.size(); ++l) {
    cov = recursive_step(cov, mean, stack.layers[l]);
    mean = matmul(stack.layers[l].mean, mean);
  }
  return cov;
}

McCovariance mc_cov(const LayerStack& stack, std::size_t samples, RngStream& rng) {
  stack.validate();
  if (samples < 2) throw InvalidArgument("mc_cov needs at least two samples");
  const RngStream base(rng.next_u64(), kMcStream);
  const std::size_t r = stack.rows(), c = stack.cols(), p = r * c;
  const std::size_t chunks = chunk_count(samples);
  const auto n_chunks = static_cast<std::ptrdiff_t>(chunks);

  // Deviations are taken from the first draw so a degenerate stack gives an
  // exactly zero table.
  std::vector<double> shift(p);
  {
    RngStream s0 = base.split(0);
    draw_into(stack, s0, shift);
  }
  std::vector<double> part_sum(chunks * p, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < n_chunks; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    RngStream s = base.split(k);
    std::vector<double> m(p);
    for (std::size_t n = 0; n < chunk_len(samples, k); ++n) {
      draw_into(stack, s, m);
      for (std::size_t q = 0; q < p; ++q) part_sum[k * p + q] += m[q] - shift[q];
    }
  }
  std::vector<double> mean(p, 0.0);
  for (std::size_t k = 0; k < chunks; ++k)
    for (std::size_t q = 0; q < p; ++q) mean[q] += part_sum[k * p + q];
  for (double& v : mean) v /= static_cast<double>(samples);

  std::vector<double> part_prod(chunks * p * p, 0.0), part_sq(chunks * p * p, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < n_chunks; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    RngStream s = base.split(k);
    std::vector<double> m(p);
    double* prod = &part_prod[k * p * p];
    double* sq = &part_sq[k * p * p];
    for (std::size_t n = 0; n < chunk_len(samples, k); ++n) {
      draw_into(stack, s, m);
      for (std::size_t q = 0; q < p; ++q) m[q] = (m[q] - shift[q]) - mean[q];
      for (std::size_t x = 0; x < p; ++x)
        for (std::size_t y = x; y < p; ++y) {
          const double v = m[x] * m[y];
          prod[x * p + y] += v;
          sq[x * p + y] += v * v;
        }
    }
  }

  McCovariance out{CovarianceTable(r, c), CovarianceTable(r, c), samples};
  const double sn = static_cast<double>(samples);
  for (std::size_t x = 0; x < p; ++x)
    for (std::size_t y = x; y < p; ++y) {
      double sp = 0.0, ss = 0.0;
      for (std::size_t k = 0; k < chunks; ++k) {
        sp += part_prod[k * p * p + x * p + y];
        ss += part_sq[k * p * p + x * p + y];
      }
      const double cov = sp / (sn - 1.0);
      const double mean_prod = sp / sn;
      const double var_prod = std::max(0.0, (ss - sn * mean_prod * mean_prod) / (sn - 1.0));
      const double se = std::sqrt(var_prod / sn);
      out.cov.values()[x * p + y] = out.cov.values()[y * p + x] = cov;
      out.std_error.values()[x * p + y] = out.std_error.values()[y * p + x] = se;
    }
  return out;
}

McCovariance mc_cov_serial(const LayerStack& stack, std::size_t samples, RngStream& rng) {
  stack.validate();
  if (samples < 2) throw InvalidArgument("mc_cov needs at least two samples");
  const RngStream base(rng.next_u64(), kMcStream);
  const std::size_t r = stack.rows(), c = stack.cols(), p = r * c;
  std::vector<double> draws(samples * p);
  std::size_t n = 0;
  for (std::size_t k = 0; k < chunk_count(samples); ++k) {
    RngStream s = base.split(k);
    for (std::size_t j = 0; j < chunk_len(samples, k); ++j, ++n)
      draw_into(stack, s, std::span<double>(draws).subspan(n * p, p));
  }
  std::vector<double> mean(p, 0.0);
  for (std::size_t i = 0; i < samples; ++i)
    for (std::size_t q = 0; q < p; ++q) mean[q] += draws[i * p + q];
  for (double& v : mean) v /= static_cast<double>(samples);

  McCovariance out{CovarianceTable(r, c), CovarianceTable(r, c), samples};
  std::vector<double> prod(samples);
  for (std::size_t x = 0; x < p; ++x)
    for (std::size_t y = 0; y < p; ++y) {
      double cov = 0.0;
      for (std::size_t i = 0; i < samples; ++i) {
        prod[i] = (draws[i * p + x] - mean[x]) * (draws[i * p + y] - mean[y]);
        cov += prod[i];
      }
      const double mp = cov / static_cast<double>(samples);
      double var = 0.0;
      for (double v : prod) var += (v - mp) * (v - mp);
      var /= static_cast<double>(samples - 1);
      out.cov.values()[x * p + y] = cov / static_cast<double>(samples - 1);
      out.std_error.values()[x * p + y] = std::sqrt(var / static_cast<double>(samples));
    }
  return out;
}

MvgResult mvg_check(const Tensor& a, const Tensor& b_mean, const Tensor& c) {
  if (a.rank() != 2 || b_mean.rank() != 2 || c.rank() != 2) throw DimensionError("mvg_check expects matrices");
  LayerStack stack{{StackLayer{c, Tensor(c.shape(), 0.0)}, StackLayer{b_mean, Tensor(b_mean.shape(), 1.0)},
                    StackLayer{a, Tensor(a.shape(), 0.0)}}};
  stack.validate();
  const CovarianceTable cov = analytic_cov_recursive(stack);
  MvgResult res{Tensor({a.rows(), a.rows()}, 0.0), Tensor({c.cols(), c.cols()}, 0.0), 0.0};
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j)
      for (std::size_t k = 0; k < a.cols(); ++k) res.u.at(i, j) += a.at(i, k) * a.at(j, k);
  for (std::size_t i = 0; i < c.cols(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j)
      for (std::size_t k = 0; k < c.rows(); ++k) res.v.at(i, j) += c.at(k, i) * c.at(k, j);
  // vec is column-major: Cov(vec M)[a + b R, c + d R] = V_bd U_ac.
  for (std::size_t ra = 0; ra < cov.rows(); ++ra)
    for (std::size_t cb = 0; cb < cov.cols(); ++cb)
      for (std::size_t rc = 0; rc < cov.rows(); ++rc)
        for (std::size_t cd = 0; cd < cov.cols(); ++cd)
          res.residual = std::max(res.residual, std::abs(cov(ra, cb, rc, cd) - res.v.at(cb, cd) * res.u.at(ra, rc)));
  return res;
}

Tensor local_product_matrix(std::span<const Tensor> weights, numcore::Activation act, std::span<const double> x) {
  if (act.negative_slope() == 0.0) throw InvalidArgument("local_product_matrix needs a non-zero negative slope");
  numcore::check_chain(weights, x.size());
  // Running affine map (rows, in + 1) from [x; 1] to the current layer.
  Tensor p({x.size(), x.size() + 1}, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) p.at(i, i) = 1.0;
  std::vector<double> h(x.begin(), x.end());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Tensor& w = weights[l];
    const std::size_t out = w.rows(), k = w.cols() - 1;
    Tensor next({out, x.size() + 1}, 0.0);
    std::vector<double> z(out, 0.0);
    for (std::size_t a = 0; a < out; ++a) {
      z[a] = w.at(a, k);
      for (std::size_t i = 0; i < k; ++i) z[a] += w.at(a, i) * h[i];
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j <= x.size(); ++j) next.at(a, j) += w.at(a, i) * p.at(i, j);
      next.at(a, x.size()) += w.at(a, k);
    }
    if (l + 1 < weights.size()) {
      for (std::size_t a = 0; a < out; ++a) {
        const double slope = z[a] >= 0.0 ? 1.0 : act.negative_slope();
        for (std::size_t j = 0; j <= x.size(); ++j) next.at(a, j) *= slope;
        z[a] *= slope;
      }
    }
    h = std::move(z);
    p = std::move(next);
  }
  return p;
}

}  // namespace evalbench::geometry
