#pragma once

#include <functional>
#include <span>
#include <vector>

#include "evalbench/numcore/autodiff.hpp"

namespace evalbench::numcore {

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

/// Max over coordinates of |analytic - central difference| / max(1, |analytic|).
/// Throws NumericError when any evaluation is not finite.
double grad_check(const ScalarFn& f, const GradientFn& grad, std::span<const double> point, double eps);

/// Builds a scalar graph from leaves holding `inputs` and differentiates it
/// with the tape. The builder must be deterministic (freeze any noise).
using GraphBuilder = std::function<Var(Tape&, std::span<const Var>)>;

struct TapeGradient {
  double value = 0.0;
  std::vector<Tensor> grads;
};

TapeGradient tape_gradient(const GraphBuilder& build, std::span<const Tensor> inputs);

/// grad_check over every coordinate of every input tensor of a tape graph.
double tape_grad_check(const GraphBuilder& build, std::span<const Tensor> inputs, double eps);

}  // namespace evalbench::numcore
