#pragma once

#include <span>
#include <vector>

#include "evalbench/numcore/mlp.hpp"
#include "evalbench/numcore/rng.hpp"
#include "evalbench/numcore/tensor.hpp"

namespace evalbench::geometry {

using numcore::RngStream;
using numcore::Tensor;

/// One bias-free mean-field layer: independent Gaussian entries.
struct StackLayer {
  Tensor mean;  // (out, in)
  Tensor std;   // same shape, entries >= 0
};

/// Layers in application order: the product matrix is W_L ... W_2 W_1 with
/// layers[0] = W_1.
struct LayerStack {
  std::vector<StackLayer> layers;

  std::size_t rows() const;  // output width of the last layer
  std::size_t cols() const;  // input width of the first layer
  /// Throws DimensionError when shapes do not chain, InvalidArgument for a
  /// negative std.
  void validate() const;

  static LayerStack random(const std::vector<std::size_t>& widths, RngStream& rng, double std_scale = 0.5);
};

/// Cov(m_ab, m_cd) for an R x C product matrix, stored densely.
class CovarianceTable {
 public:
  CovarianceTable() = default;
  CovarianceTable(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return v_[index(a, b, c, d)];
  }
  double operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return v_[index(a, b, c, d)];
  }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  friend bool operator==(const CovarianceTable&, const CovarianceTable&) = default;

 private:
  std::size_t index(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return ((a * cols_ + b) * rows_ + c) * cols_ + d;
  }
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

Tensor sample_layer(const StackLayer& layer, RngStream& rng);
Tensor product_matrix_sample(const LayerStack& stack, RngStream& rng);
/// E[M] = product of the means (layers are independent).
Tensor product_mean(const LayerStack& stack);

CovarianceTable analytic_cov_two_layer(const LayerStack& stack);
/// One layer of the recursion: covariance of W * M given Cov(M) and E[M].
CovarianceTable recursive_step(const CovarianceTable& prev, const Tensor& prev_mean, const StackLayer& layer);
/// Diagonal covariance of a single layer.
CovarianceTable single_layer_cov(const StackLayer& layer);
/// L >= 2; the L = 2 case is analytic_cov_two_layer.
CovarianceTable analytic_cov_recursive(const LayerStack& stack);

struct McCovariance {
  CovarianceTable cov;        // unbiased sample covariance
  CovarianceTable std_error;  // per-entry standard error of `cov`
  std::size_t samples = 0;
};

/// OpenMP over fixed-size chunks; chunk k draws from a stream split off a key
/// taken from `rng`, so the result does not depend on the thread count.
McCovariance mc_cov(const LayerStack& stack, std::size_t samples, RngStream& rng);
/// Single-threaded reference with the same draws; stores every sample.
McCovariance mc_cov_serial(const LayerStack& stack, std::size_t samples, RngStream& rng);

inline constexpr std::size_t kMcChunk = 4096;

struct MvgResult {
  Tensor u;  // A A^T
  Tensor v;  // C^T C
  double residual = 0.0;
};

/// Product A B C with deterministic A, C and unit-variance B: compares the
/// recursive covariance against the Kronecker arrangement V (x) U.
MvgResult mvg_check(const Tensor& a, const Tensor& b_mean, const Tensor& c);

/// Matrix P (out, in + 1) with P [x; 1] = f(x) for a piecewise-linear net with
/// bias columns. A pre-activation of exactly zero takes the positive branch;
/// both branches give the same output there.
Tensor local_product_matrix(std::span<const Tensor> weights, numcore::Activation act, std::span<const double> x);

}  // namespace evalbench::geometry
