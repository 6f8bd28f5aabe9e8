#include "evalbench/bnn/train.hpp"

#include <cmath>
#include <limits>

#include "evalbench/bnn/predict.hpp"
#include "evalbench/numcore/error.hpp"

namespace evalbench::bnn {

void TrainConfig::validate() const {
  if (batch_size == 0) throw InvalidArgument("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (train_samples == 0 || test_samples == 0) throw InvalidArgument("sample counts must be positive");
  if (!(kl_scale >= 0.0 && kl_scale <= 1.0)) throw InvalidArgument("kl_scale must lie in [0, 1]");
}

Adam::Adam(std::size_t n, double lr, bool amsgrad) : lr_(lr), amsgrad_(amsgrad), m_(n, 0.0), v_(n, 0.0), vmax_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads, const std::vector<bool>* frozen) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++t_;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (frozen != nullptr && (*frozen)[i]) continue;
    m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i] * grads[i];
    double v = v_[i];
    if (amsgrad_) {
      vmax_[i] = std::max(vmax_[i], v_[i]);
      v = vmax_[i];
    }
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v / c2) + eps);
  }
}

namespace {

std::vector<double> collect_grads(const ElboGraph& g) {
  std::vector<double> out;
  for (std::size_t l = 0; l < g.mu.size(); ++l) {
    out.insert(out.end(), g.mu[l].grad().data().begin(), g.mu[l].grad().data().end());
    out.insert(out.end(), g.rho[l].grad().data().begin(), g.rho[l].grad().data().end());
  }
  return out;
}

std::vector<bool> rho_mask(const BayesianMlp& model) {
  std::vector<bool> frozen;
  for (const auto& l : model.layers) {
    frozen.insert(frozen.end(), l.mu.size(), false);
    frozen.insert(frozen.end(), l.rho.size(), true);
  }
  return frozen;
}

}  // namespace

TrainResult train(const BayesianMlp& model, const Dataset& dataset, const Prior& prior, const TrainConfig& cfg,
                  std::span<const double> weights, const Dataset* val) {
  cfg.validate();
  model.validate();
  if (dataset.size() == 0) throw InvalidArgument("train: dataset is empty");
  if (!weights.empty() && weights.size() != dataset.size()) throw DimensionError("train: weights do not match dataset");

  TrainResult result;
  result.model = model;
  RngStream rng(cfg.seed, 0x7261696e);  // "rain"
  std::vector<double> params = flatten_params(model);
  Adam adam(params.size(), cfg.learning_rate, cfg.amsgrad);
  const std::vector<bool> rho_frozen = rho_mask(model);
  const bool never_rho = cfg.deterministic || model.posterior.tag == PosteriorTag::mc_dropout;

  const std::size_t n = dataset.size();
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_params = params;
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const bool mean_phase = cfg.deterministic || epoch < cfg.mean_pretrain_epochs;
    auto order = numcore::permutation(rng, n);
    EpochRecord rec;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      Dataset batch = dataset.subset(idx);
      std::vector<double> bw;
      if (!weights.empty())
        for (auto i : idx) bw.push_back(weights[i]);

      ElboOptions opts;
      opts.kl_scale = cfg.kl_scale;
      opts.n_total = static_cast<double>(n);
      opts.weights = bw;
      opts.allowed_classes = cfg.allowed_classes;
      opts.mean_only = mean_phase;

      Noise noise = mean_phase ? Noise{} : draw_noise(result.model, cfg.train_samples, rng);
      Tape tape;
      ElboGraph g;
      try {
        g = build_elbo(tape, result.model, batch, prior, noise, opts);
      } catch (const NumericError&) {
        result.diverged = true;
        return result;
      }
      Var root = g.loss;
      if (cfg.penalty) root = numcore::ad::add(root, cfg.penalty(tape, g.mu));
      if (!std::isfinite(root.value().item())) {
        result.diverged = true;
        return result;
      }
      tape.backward(root);
      const std::vector<double> grads = collect_grads(g);
      adam.step(params, grads, (mean_phase || never_rho) ? &rho_frozen : nullptr);
      unflatten_params(result.model, params);

      rec.train.nll += g.nll.value().item();
      rec.train.prior_cross_entropy += g.prior_cross_entropy.value().item();
      rec.train.entropy += g.entropy.value().item();
      rec.train.loss += g.loss.value().item();
      ++batches;
    }
    rec.train.nll /= static_cast<double>(batches);
    rec.train.prior_cross_entropy /= static_cast<double>(batches);
    rec.train.entropy /= static_cast<double>(batches);
    rec.train.loss /= static_cast<double>(batches);

    rec.val_nll = std::numeric_limits<double>::quiet_NaN();
    if (val != nullptr && val->size() > 0) {
      RngStream vrng(cfg.seed, 0x76616c00 + epoch);
      rec.val_nll = mean_nll(result.model, *val, cfg.deterministic ? 0 : cfg.test_samples, vrng, cfg.allowed_classes);
      if (rec.val_nll < best_val) {
        best_val = rec.val_nll;
        best_params = params;
        result.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        result.history.push_back(rec);
        break;
      }
    }
    result.history.push_back(rec);
  }
  if (val != nullptr && val->size() > 0 && !result.history.empty()) unflatten_params(result.model, best_params);
  else if (!result.history.empty()) result.best_epoch = result.history.size() - 1;
  return result;
}

}  // namespace evalbench::bnn
