#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "evalbench/numcore/tensor.hpp"

namespace evalbench::numcore {

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so index order is
/// a topological order and backward() walks it once in reverse.
class Tape {
 public:
  using Backprop = std::function<void(Tape&, const Tensor& upstream)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Differentiable input.
  Var leaf(Tensor value);
  /// Input that never receives a gradient.
  Var constant(Tensor value);

  /// Records the result of a primitive. `backprop` receives the adjoint of the
  /// new node and must accumulate into the parents via accumulate().
  Var record(Tensor value, std::span<const Var> parents, Backprop backprop);

  const Tensor& value(Var v) const { return nodes_[v.id_].value; }
  const Tensor& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id_].requires_grad; }

  void accumulate(Var target, const Tensor& delta);
  /// Adds `delta` at flat index `i` of the target adjoint.
  void accumulate_at(Var target, std::size_t i, double delta);

  /// Seeds the scalar root with 1 and propagates adjoints. Parameters that do
  /// not reach the root end up with exact zeros.
  void backward(Var root);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    Backprop backprop;
  };

  Tensor& grad_ref(std::size_t id);

  std::deque<Node> nodes_;
};

namespace ad {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double c);
/// a + c with c a constant tensor of the same shape.
Var add_const(Var a, const Tensor& c);
/// Elementwise product with a constant tensor of the same shape.
Var mul_const(Var a, const Tensor& c);

Var square(Var a);
Var log(Var a);
/// log(1 + e^a), computed without overflow.
Var softplus(Var a);
Var leaky_relu(Var a, double alpha);

/// Sum of all elements, shape (1).
Var sum(Var a);
/// Sum of w_i * a_i with constant w, shape (1).
Var dot_const(Var a, std::span<const double> w);

/// x (n, in) times w (out, in + 1) transposed, with the last column of w
/// acting as bias. Result has shape (n, out).
Var affine(Var x, Var w);

/// Per-example negative log-softmax of the labelled class, shape (n).
/// When `allowed` is non-empty the softmax is restricted to those classes.
Var softmax_cross_entropy(Var logits, std::span<const std::size_t> labels,
                          std::span<const std::size_t> allowed = {});

/// Per-example Gaussian negative log-likelihood for predictions of shape (n, 1).
Var gaussian_nll(Var pred, std::span<const double> targets, double sigma);

}  // namespace ad

/// Numerically stable log(1 + e^x).
double softplus(double x);
/// Logistic sigmoid, the derivative of softplus.
double sigmoid(double x);
/// Inverse of softplus for y > 0.
double inverse_softplus(double y);

}  // namespace evalbench::numcore
