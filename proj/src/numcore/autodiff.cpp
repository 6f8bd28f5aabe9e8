#include "evalbench/numcore/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "evalbench/numcore/error.hpp"

namespace evalbench::numcore {

const Tensor& Var::value() const { return tape_->value(*this); }
const Tensor& Var::grad() const { return tape_->grad(*this); }

Var Tape::leaf(Tensor value) {
  Node node;
  node.grad = Tensor::zeros_like(value);
  node.value = std::move(value);
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::span<const Var> parents, Backprop backprop) {
  Node node;
  for (const Var& p : parents) {
    if (p.tape_ != this) throw InvalidArgument("autodiff: mixing nodes from different tapes");
    node.requires_grad = node.requires_grad || nodes_[p.id_].requires_grad;
  }
  if (node.requires_grad) {
    node.grad = Tensor::zeros_like(value);
    node.backprop = std::move(backprop);
  }
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::grad(Var v) const {
  const Node& node = nodes_[v.id_];
  if (!node.requires_grad) throw InvalidArgument("autodiff: gradient requested for a constant node");
  return node.grad;
}

Tensor& Tape::grad_ref(std::size_t id) { return nodes_[id].grad; }

void Tape::accumulate(Var target, const Tensor& delta) {
  Node& node = nodes_[target.id_];
  if (!node.requires_grad) return;
  auto g = node.grad.data();
  auto d = delta.data();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += d[i];
}

void Tape::accumulate_at(Var target, std::size_t i, double delta) {
  Node& node = nodes_[target.id_];
  if (node.requires_grad) node.grad[i] += delta;
}

void Tape::backward(Var root) {
  if (root.tape_ != this) throw InvalidArgument("backward: root belongs to another tape");
  if (nodes_[root.id_].value.size() != 1) {
    throw DimensionError("backward: root must be scalar, got shape " +
                         shape_string(nodes_[root.id_].value.shape()));
  }
  for (auto& node : nodes_) {
    if (node.requires_grad) std::fill(node.grad.data().begin(), node.grad.data().end(), 0.0);
  }
  if (!nodes_[root.id_].requires_grad) return;
  nodes_[root.id_].grad[0] = 1.0;
  for (std::size_t i = root.id_ + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.requires_grad && node.backprop) node.backprop(*this, node.grad);
  }
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double inverse_softplus(double y) {
  if (!(y > 0.0)) throw InvalidArgument("inverse_softplus: argument must be positive");
  // log(e^y - 1) = y + log(1 - e^{-y})
  return y + std::log(-std::expm1(-y));
}

namespace ad {

namespace {

Tensor map(const Tensor& a, auto&& f) {
  Tensor out = Tensor::zeros_like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

}  // namespace

Var add(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  const Var parents[] = {a, b};
  return a.tape()->record(std::move(out), parents, [a, b](Tape& t, const Tensor& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  const Var parents[] = {a, b};
  return a.tape()->record(std::move(out), parents, [a, b](Tape& t, const Tensor& g) {
    t.accumulate(a, g);
    Tensor neg = map(g, [](double v) { return -v; });
    t.accumulate(b, neg);
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  const Var parents[] = {a, b};
  return a.tape()->record(std::move(out), parents, [a, b](Tape& t, const Tensor& g) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < g.size(); ++i) {
      t.accumulate_at(a, i, g[i] * bv[i]);
      t.accumulate_at(b, i, g[i] * av[i]);
    }
  });
}

Var scale(Var a, double factor) {
  Tensor out = map(a.value(), [factor](double v) { return v * factor; });
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a, factor](Tape& t, const Tensor& g) {
    for (std::size_t i = 0; i < g.size(); ++i) t.accumulate_at(a, i, g[i] * factor);
  });
}

Var add_scalar(Var a, double c) {
  Tensor out = map(a.value(), [c](double v) { return v + c; });
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a](Tape& t, const Tensor& g) { t.accumulate(a, g); });
}

Var add_const(Var a, const Tensor& c) {
  require_same_shape(a.value(), c, "add_const");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i];
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a](Tape& t, const Tensor& g) { t.accumulate(a, g); });
}

Var mul_const(Var a, const Tensor& c) {
  require_same_shape(a.value(), c, "mul_const");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c[i];
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a, c](Tape& t, const Tensor& g) {
    for (std::size_t i = 0; i < g.size(); ++i) t.accumulate_at(a, i, g[i] * c[i]);
  });
}

Var square(Var a) {
  Tensor out = map(a.value(), [](double v) { return v * v; });
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a](Tape& t, const Tensor& g) {
    const Tensor& av = a.value();
    for (std::size_t i = 0; i < g.size(); ++i) t.accumulate_at(a, i, 2.0 * av[i] * g[i]);
  });
}

Var log(Var a) {
  Tensor out = map(a.value(), [](double v) { return std::log(v); });
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a](Tape& t, const Tensor& g) {
    const Tensor& av = a.value();
    for (std::size_t i = 0; i < g.size(); ++i) t.accumulate_at(a, i, g[i] / av[i]);
  });
}

Var softplus(Var a) {
  Tensor out = map(a.value(), [](double v) { return numcore::softplus(v); });
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a](Tape& t, const Tensor& g) {
    const Tensor& av = a.value();
    for (std::size_t i = 0; i < g.size(); ++i) t.accumulate_at(a, i, g[i] * sigmoid(av[i]));
  });
}

Var leaky_relu(Var a, double alpha) {
  Tensor out = map(a.value(), [alpha](double v) { return v > 0.0 ? v : alpha * v; });
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a, alpha](Tape& t, const Tensor& g) {
    const Tensor& av = a.value();
    for (std::size_t i = 0; i < g.size(); ++i) t.accumulate_at(a, i, av[i] > 0.0 ? g[i] : alpha * g[i]);
  });
}

Var sum(Var a) {
  Tensor out = Tensor::scalar(numcore::sum(a.value()));
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a](Tape& t, const Tensor& g) {
    const double up = g[0];
    for (std::size_t i = 0; i < a.value().size(); ++i) t.accumulate_at(a, i, up);
  });
}

Var dot_const(Var a, std::span<const double> w) {
  if (w.size() != a.value().size()) throw DimensionError("dot_const: weight length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += a.value()[i] * w[i];
  std::vector<double> weights(w.begin(), w.end());
  const Var parents[] = {a};
  return a.tape()->record(Tensor::scalar(s), parents, [a, weights = std::move(weights)](Tape& t, const Tensor& g) {
    const double up = g[0];
    for (std::size_t i = 0; i < weights.size(); ++i) t.accumulate_at(a, i, up * weights[i]);
  });
}

Var affine(Var x, Var w) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  if (xv.rank() != 2 || wv.rank() != 2 || wv.cols() != xv.cols() + 1) {
    throw DimensionError("affine: input " + shape_string(xv.shape()) + " does not chain with weight " +
                         shape_string(wv.shape()));
  }
  const std::size_t n = xv.rows();
  const std::size_t in = xv.cols();
  const std::size_t out_dim = wv.rows();
  Tensor out({n, out_dim});
  for (std::size_t r = 0; r < n; ++r) {
    auto xr = xv.row(r);
    for (std::size_t o = 0; o < out_dim; ++o) {
      auto wr = wv.row(o);
      double s = wr[in];
      for (std::size_t k = 0; k < in; ++k) s += xr[k] * wr[k];
      out.at(r, o) = s;
    }
  }
  const Var parents[] = {x, w};
  return x.tape()->record(std::move(out), parents, [x, w, n, in, out_dim](Tape& t, const Tensor& g) {
    const Tensor& xv = x.value();
    const Tensor& wv = w.value();
    if (t.requires_grad(x)) {
      Tensor dx = Tensor::zeros_like(xv);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t o = 0; o < out_dim; ++o) {
          const double go = g[r * out_dim + o];
          if (go == 0.0) continue;
          for (std::size_t k = 0; k < in; ++k) dx.at(r, k) += go * wv.at(o, k);
        }
      }
      t.accumulate(x, dx);
    }
    if (t.requires_grad(w)) {
      Tensor dw = Tensor::zeros_like(wv);
      for (std::size_t r = 0; r < n; ++r) {
        auto xr = xv.row(r);
        for (std::size_t o = 0; o < out_dim; ++o) {
          const double go = g[r * out_dim + o];
          if (go == 0.0) continue;
          auto dwr = dw.row(o);
          for (std::size_t k = 0; k < in; ++k) dwr[k] += go * xr[k];
          dwr[in] += go;
        }
      }
      t.accumulate(w, dw);
    }
  });
}

Var softmax_cross_entropy(Var logits, std::span<const std::size_t> labels, std::span<const std::size_t> allowed) {
  const Tensor& lv = logits.value();
  if (lv.rank() != 2) throw DimensionError("softmax_cross_entropy: logits must be rank 2");
  const std::size_t n = lv.rows();
  const std::size_t c = lv.cols();
  if (labels.size() != n) throw DimensionError("softmax_cross_entropy: label count mismatch");

  std::vector<std::size_t> classes;
  if (allowed.empty()) {
    classes.resize(c);
    for (std::size_t k = 0; k < c; ++k) classes[k] = k;
  } else {
    classes.assign(allowed.begin(), allowed.end());
    for (auto k : classes) {
      if (k >= c) throw DimensionError("softmax_cross_entropy: allowed class out of range");
    }
  }

  Tensor out({n});
  Tensor probs({n, c}, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = lv.row(r);
    if (labels[r] >= c || std::find(classes.begin(), classes.end(), labels[r]) == classes.end()) {
      throw InvalidArgument("softmax_cross_entropy: label outside the scored classes");
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (auto k : classes) mx = std::max(mx, row[k]);
    double z = 0.0;
    for (auto k : classes) z += std::exp(row[k] - mx);
    const double lse = mx + std::log(z);
    out[r] = lse - row[labels[r]];
    for (auto k : classes) probs.at(r, k) = std::exp(row[k] - lse);
  }

  std::vector<std::size_t> label_copy(labels.begin(), labels.end());
  const Var parents[] = {logits};
  return logits.tape()->record(
      std::move(out), parents,
      [logits, probs = std::move(probs), label_copy = std::move(label_copy), classes, c](Tape& t, const Tensor& g) {
        for (std::size_t r = 0; r < label_copy.size(); ++r) {
          const double up = g[r];
          if (up == 0.0) continue;
          for (auto k : classes) {
            const double indicator = (k == label_copy[r]) ? 1.0 : 0.0;
            t.accumulate_at(logits, r * c + k, up * (probs.at(r, k) - indicator));
          }
        }
      });
}

Var gaussian_nll(Var pred, std::span<const double> targets, double sigma) {
  const Tensor& pv = pred.value();
  if (pv.rank() != 2 || pv.cols() != 1 || pv.rows() != targets.size()) {
    throw DimensionError("gaussian_nll: prediction shape " + shape_string(pv.shape()) + " vs " +
                         std::to_string(targets.size()) + " targets");
  }
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_nll: sigma must be positive");
  const double inv_var = 1.0 / (sigma * sigma);
  const double norm = 0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma);
  Tensor out({targets.size()});
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double r = pv[i] - targets[i];
    out[i] = norm + 0.5 * r * r * inv_var;
  }
  std::vector<double> y(targets.begin(), targets.end());
  const Var parents[] = {pred};
  return pred.tape()->record(std::move(out), parents, [pred, y = std::move(y), inv_var](Tape& t, const Tensor& g) {
    const Tensor& pv = pred.value();
    for (std::size_t i = 0; i < y.size(); ++i) t.accumulate_at(pred, i, g[i] * (pv[i] - y[i]) * inv_var);
  });
}

}  // namespace ad
}  // namespace evalbench::numcore
