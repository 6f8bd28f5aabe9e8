#include "evalbench/numcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "evalbench/numcore/error.hpp"

namespace evalbench::numcore {

namespace {

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string("grad_check: non-finite ") + what);
  return v;
}

}  // namespace

double grad_check(const ScalarFn& f, const GradientFn& grad, std::span<const double> point, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("grad_check: eps must be positive");
  const std::vector<double> analytic = grad(point);
  if (analytic.size() != point.size()) throw DimensionError("grad_check: gradient length mismatch");
  std::vector<double> x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + eps;
    const double up = finite_or_throw(f(x), "function value");
    x[i] = orig - eps;
    const double down = finite_or_throw(f(x), "function value");
    x[i] = orig;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = finite_or_throw(analytic[i], "analytic gradient");
    worst = std::max(worst, std::abs(a - numeric) / std::max(1.0, std::abs(a)));
  }
  return worst;
}

TapeGradient tape_gradient(const GraphBuilder& build, std::span<const Tensor> inputs) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const auto& t : inputs) leaves.push_back(tape.leaf(t));
  Var root = build(tape, leaves);
  tape.backward(root);
  TapeGradient out;
  out.value = root.value().item();
  for (const auto& leaf : leaves) out.grads.push_back(leaf.grad());
  return out;
}

double tape_grad_check(const GraphBuilder& build, std::span<const Tensor> inputs, double eps) {
  std::vector<std::size_t> offsets;
  std::vector<double> flat;
  for (const auto& t : inputs) {
    offsets.push_back(flat.size());
    flat.insert(flat.end(), t.data().begin(), t.data().end());
  }
  auto unflatten = [&](std::span<const double> x) {
    std::vector<Tensor> ts;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      std::vector<double> vals(x.begin() + static_cast<std::ptrdiff_t>(offsets[k]),
                               x.begin() + static_cast<std::ptrdiff_t>(offsets[k] + inputs[k].size()));
      ts.emplace_back(inputs[k].shape(), std::move(vals));
    }
    return ts;
  };
  ScalarFn f = [&](std::span<const double> x) {
    auto ts = unflatten(x);
    Tape tape;
    std::vector<Var> leaves;
    for (auto& t : ts) leaves.push_back(tape.constant(std::move(t)));
    return build(tape, leaves).value().item();
  };
  GradientFn g = [&](std::span<const double> x) {
    auto ts = unflatten(x);
    auto tg = tape_gradient(build, ts);
    std::vector<double> out;
    for (const auto& gt : tg.grads) out.insert(out.end(), gt.data().begin(), gt.data().end());
    return out;
  };
  return grad_check(f, g, flat, eps);
}

}  // namespace evalbench::numcore
