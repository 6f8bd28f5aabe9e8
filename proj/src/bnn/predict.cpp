#include "evalbench/bnn/predict.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "evalbench/numcore/error.hpp"
#include "evalbench/posteriors/samplers.hpp"

namespace evalbench::bnn {

namespace {

std::vector<Tensor> weights_for(const BayesianMlp& model, const Noise& noise, std::size_t s) {
  std::vector<Tensor> ws;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    const LayerNoise& ln = noise.draws[s][l];
    if (model.posterior.tag == PosteriorTag::mc_dropout) {
      Tensor w = layer.mu;
      if (!ln.mask.empty()) {
        for (std::size_t r = 0; r < w.rows(); ++r)
          for (auto& v : w.row(r)) v *= ln.mask[r];
      }
      ws.push_back(std::move(w));
    } else if (model.posterior.tag == PosteriorTag::radial) {
      ws.push_back(posteriors::apply_radial(layer, ln.eps, ln.radius));
    } else {
      ws.push_back(posteriors::apply_gaussian(layer, ln.eps));
    }
  }
  return ws;
}

Tensor head_output(const BayesianMlp& model, std::span<const Tensor> ws, const Tensor& x) {
  Tensor out = numcore::mlp_forward(ws, model.activation, x).back();
  return model.head.kind == HeadKind::classifier ? numcore::softmax_rows(out) : out;
}

}  // namespace

std::vector<Tensor> predict_with_noise(const BayesianMlp& model, const Tensor& x, const Noise& noise) {
  std::vector<Tensor> out;
  for (std::size_t s = 0; s < noise.samples(); ++s) out.push_back(head_output(model, weights_for(model, noise, s), x));
  return out;
}

std::vector<Tensor> predict_samples(const BayesianMlp& model, const Tensor& x, std::size_t samples, RngStream& rng) {
  if (samples == 0) {
    const std::vector<Tensor> mus = model.means();
    return {head_output(model, mus, x)};
  }
  return predict_with_noise(model, x, draw_noise(model, samples, rng));
}

Tensor restrict_classes(const Tensor& probs, std::span<const std::size_t> classes) {
  Tensor out(probs.shape(), 0.0);
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    double z = 0.0;
    for (auto c : classes) z += probs.at(r, c);
    for (auto c : classes) out.at(r, c) = z > 0.0 ? probs.at(r, c) / z : 1.0 / static_cast<double>(classes.size());
  }
  return out;
}

Tensor mean_prediction(std::span<const Tensor> samples) {
  if (samples.empty()) throw InvalidArgument("mean_prediction of no samples");
  Tensor m = samples[0];
  for (std::size_t s = 1; s < samples.size(); ++s)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += samples[s][i];
  for (auto& v : m.data()) v /= static_cast<double>(samples.size());
  return m;
}

double mean_nll(const BayesianMlp& model, const Dataset& ds, std::size_t samples, RngStream& rng,
                std::span<const std::size_t> allowed_classes) {
  if (ds.size() == 0) throw InvalidArgument("mean_nll on empty dataset");
  auto preds = predict_samples(model, ds.x, samples, rng);
  double total = 0.0;
  if (model.head.kind == HeadKind::regressor) {
    const double s2 = model.head.sigma_obs * model.head.sigma_obs;
    const double norm = 0.5 * std::log(2.0 * std::numbers::pi * s2);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      // log mean_s N(y; f_s, sigma^2) via log-sum-exp.
      std::vector<double> lp;
      double mx = -std::numeric_limits<double>::infinity();
      for (const auto& p : preds) {
        const double r = p[i] - ds.targets[i];
        lp.push_back(-norm - 0.5 * r * r / s2);
        mx = std::max(mx, lp.back());
      }
      double z = 0.0;
      for (double v : lp) z += std::exp(v - mx);
      total -= mx + std::log(z / static_cast<double>(preds.size()));
    }
  } else {
    Tensor m = mean_prediction(preds);
    if (!allowed_classes.empty()) m = restrict_classes(m, allowed_classes);
    for (std::size_t i = 0; i < ds.size(); ++i) total -= std::log(std::max(m.at(i, ds.labels[i]), 1e-300));
  }
  return total / static_cast<double>(ds.size());
}

std::vector<double> per_example_loss(const BayesianMlp& model, const Dataset& ds, std::size_t samples, RngStream& rng) {
  auto preds = predict_samples(model, ds.x, samples, rng);
  Tensor m = mean_prediction(preds);
  std::vector<double> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (model.head.kind == HeadKind::regressor) {
      const double r = m[i] - ds.targets[i];
      out[i] = r * r;
    } else {
      out[i] = -std::log(std::max(m.at(i, ds.labels[i]), 1e-300));
    }
  }
  return out;
}

std::size_t argmax_row(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < row.size(); ++k)
    if (row[k] > row[best]) best = k;
  return best;
}

double accuracy(const Tensor& probs, std::span<const std::size_t> labels) {
  if (labels.empty()) throw InvalidArgument("accuracy of empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += argmax_row(probs.row(i)) == labels[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

Tensor ensemble_average(std::span<const Tensor> member_probs) { return mean_prediction(member_probs); }

}  // namespace evalbench::bnn
