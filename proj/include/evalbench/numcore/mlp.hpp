#pragma once

#include <span>
#include <string>
#include <vector>

#include "evalbench/numcore/autodiff.hpp"
#include "evalbench/numcore/tensor.hpp"

namespace evalbench::numcore {

enum class ActivationKind { identity, relu, leaky_relu };

struct Activation {
  ActivationKind kind = ActivationKind::relu;
  double alpha = 0.1;

  static Activation identity() { return {ActivationKind::identity, 0.0}; }
  static Activation relu() { return {ActivationKind::relu, 0.0}; }
  static Activation leaky(double a = 0.1) { return {ActivationKind::leaky_relu, a}; }

  /// Slope on the negative side: 1 for identity, 0 for relu, alpha otherwise.
  double negative_slope() const;
  double apply(double v) const { return v > 0.0 ? v : negative_slope() * v; }
};

Activation parse_activation(const std::string& name);
std::string to_string(const Activation& a);

/// Checks that weights (out, in + 1) chain from `in_dim`. Throws DimensionError.
void check_chain(std::span<const Tensor> weights, std::size_t in_dim);

/// Pure forward pass. Hidden layers use `act`; the last layer is affine
/// (logits or regression output). Returns the post-activation output of every
/// layer, the last entry having shape (batch, out_dim).
std::vector<Tensor> mlp_forward(std::span<const Tensor> weights, const Activation& act, const Tensor& x);

/// Same computation recorded on a tape; returns the output node.
Var mlp_forward(std::span<const Var> weights, const Activation& act, Var x);

/// Row-wise softmax of a (batch, classes) tensor.
Tensor softmax_rows(const Tensor& logits);

}  // namespace evalbench::numcore
