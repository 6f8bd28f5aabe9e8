#include "evalbench/numcore/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "evalbench/numcore/error.hpp"

namespace evalbench::numcore {

double Activation::negative_slope() const {
  switch (kind) {
    case ActivationKind::identity: return 1.0;
    case ActivationKind::relu: return 0.0;
    case ActivationKind::leaky_relu: return alpha;
  }
  return 0.0;
}

Activation parse_activation(const std::string& name) {
  if (name == "identity") return Activation::identity();
  if (name == "relu") return Activation::relu();
  if (name == "leaky_relu" || name == "leaky-relu") return Activation::leaky();
  throw InvalidArgument("unknown activation '" + name + "'");
}

std::string to_string(const Activation& a) {
  switch (a.kind) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::relu: return "relu";
    case ActivationKind::leaky_relu: return "leaky_relu";
  }
  return "?";
}

void check_chain(std::span<const Tensor> weights, std::size_t in_dim) {
  if (weights.empty()) throw DimensionError("network has no layers");
  std::size_t width = in_dim;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Tensor& w = weights[l];
    if (w.rank() != 2 || w.cols() != width + 1) {
      throw DimensionError("layer " + std::to_string(l) + " has shape " + shape_string(w.shape()) +
                           " but receives width " + std::to_string(width));
    }
    width = w.rows();
  }
}

std::vector<Tensor> mlp_forward(std::span<const Tensor> weights, const Activation& act, const Tensor& x) {
  if (x.rank() != 2) throw DimensionError("mlp_forward: input must be (batch, features)");
  check_chain(weights, x.cols());
  std::vector<Tensor> acts;
  acts.reserve(weights.size());
  const Tensor* input = &x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Tensor& w = weights[l];
    const std::size_t n = input->rows();
    const std::size_t in = input->cols();
    const std::size_t out_dim = w.rows();
    Tensor out({n, out_dim});
    const bool hidden = l + 1 < weights.size();
    for (std::size_t r = 0; r < n; ++r) {
      auto xr = input->row(r);
      for (std::size_t o = 0; o < out_dim; ++o) {
        auto wr = w.row(o);
        double s = wr[in];
        for (std::size_t k = 0; k < in; ++k) s += xr[k] * wr[k];
        out.at(r, o) = hidden ? act.apply(s) : s;
      }
    }
    acts.push_back(std::move(out));
    input = &acts.back();
  }
  return acts;
}

Var mlp_forward(std::span<const Var> weights, const Activation& act, Var x) {
  if (weights.empty()) throw DimensionError("network has no layers");
  Var h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = ad::affine(h, weights[l]);
    if (l + 1 < weights.size() && act.kind != ActivationKind::identity) {
      h = ad::leaky_relu(h, act.negative_slope());
    }
  }
  return h;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out = logits;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = out.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (auto& v : row) {
      v = std::exp(v - mx);
      z += v;
    }
    for (auto& v : row) v /= z;
  }
  return out;
}

}  // namespace evalbench::numcore
