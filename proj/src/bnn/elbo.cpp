#include "evalbench/bnn/elbo.hpp"

#include <cmath>
#include <numbers>

#include "evalbench/numcore/error.hpp"
#include "evalbench/posteriors/samplers.hpp"

namespace evalbench::bnn {

namespace ad = numcore::ad;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

void check_finite(double v, const char* term) {
  if (!std::isfinite(v)) throw NumericError(std::string("ELBO term '") + term + "' is not finite");
}

/// -E_q[log p(w)] for a Gaussian prior, exact given the posterior's second
/// moment factor (1 for Gaussian, the truncation factor, 1/D for radial).
Var gaussian_prior_ce(Var mu, Var sigma, const MeanFieldLayer& p, double var_factor) {
  const Tensor sp = p.sigma();
  Tensor inv2 = Tensor::zeros_like(sp);
  Tensor neg_mu = Tensor::zeros_like(sp);
  double consts = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    inv2[i] = 1.0 / (2.0 * sp[i] * sp[i]);
    neg_mu[i] = -p.mu[i];
    consts += std::log(sp[i]) + kHalfLog2Pi;
  }
  Var mean_term = ad::dot_const(ad::square(ad::add_const(mu, neg_mu)), inv2.data());
  Var var_term = ad::scale(ad::dot_const(ad::square(sigma), inv2.data()), var_factor);
  return ad::add_scalar(ad::add(mean_term, var_term), consts);
}

/// -log p(w) for a radial prior evaluated at one weight draw, with the
/// hyperspherical Jacobian kept: log(2 pi)/2 + |v|^2/2 + sum log sigma_p.
Var radial_prior_ce_sample(Var w, const MeanFieldLayer& p) {
  const Tensor sp = p.sigma();
  Tensor inv = Tensor::zeros_like(sp);
  Tensor neg_mu = Tensor::zeros_like(sp);
  double consts = kHalfLog2Pi;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    inv[i] = 1.0 / sp[i];
    neg_mu[i] = -p.mu[i];
    consts += std::log(sp[i]);
  }
  Var v = ad::mul_const(ad::add_const(w, neg_mu), inv);
  return ad::add_scalar(ad::scale(ad::sum(ad::square(v)), 0.5), consts);
}

Var layer_entropy(Var sigma, const PosteriorKind& kind, std::size_t size) {
  const double d = static_cast<double>(size);
  Var sum_log = ad::sum(ad::log(sigma));
  switch (kind.tag) {
    case PosteriorTag::gaussian: return ad::add_scalar(sum_log, 0.5 * d * std::log(2.0 * std::numbers::pi * std::numbers::e));
    case PosteriorTag::radial: return ad::add_scalar(sum_log, kHalfLog2Pi + 0.5);
    case PosteriorTag::truncated: {
      const double c = kind.truncation;
      const double phi = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
      const double z = std::erf(c / std::numbers::sqrt2);
      const double per = std::log(std::sqrt(2.0 * std::numbers::pi * std::numbers::e) * z) - c * phi / z;
      return ad::add_scalar(sum_log, d * per);
    }
    case PosteriorTag::mc_dropout: break;
  }
  return ad::scale(sum_log, 0.0);
}

double second_moment_factor(const PosteriorKind& kind, std::size_t size) {
  switch (kind.tag) {
    case PosteriorTag::gaussian: return 1.0;
    case PosteriorTag::truncated: return posteriors::truncated_variance_factor(kind.truncation);
    case PosteriorTag::radial: return 1.0 / static_cast<double>(size);
    case PosteriorTag::mc_dropout: return 0.0;
  }
  return 1.0;
}

}  // namespace

Noise draw_noise(const BayesianMlp& model, std::size_t samples, RngStream& rng) {
  if (samples == 0) throw InvalidArgument("need at least one variational sample");
  Noise noise;
  noise.draws.resize(samples);
  const bool dropout = model.posterior.tag == PosteriorTag::mc_dropout;
  if (dropout) {
    // One consistent mask set per hidden layer; sample s uses mask s.
    for (std::size_t l = 0; l + 1 < model.layers.size(); ++l) {
      const Tensor masks = posteriors::dropout_masks(model.layers[l].rows(), rng, model.posterior.dropout, samples);
      for (std::size_t s = 0; s < samples; ++s) {
        LayerNoise ln;
        ln.mask = Tensor({masks.cols(), 1}, std::vector<double>(masks.row(s).begin(), masks.row(s).end()));
        noise.draws[s].push_back(std::move(ln));
      }
    }
    for (std::size_t s = 0; s < samples; ++s) noise.draws[s].push_back(LayerNoise{});
    return noise;
  }
  for (std::size_t s = 0; s < samples; ++s) {
    for (const auto& layer : model.layers) {
      auto ws = posteriors::sample(layer, model.posterior, rng);
      noise.draws[s].push_back(LayerNoise{std::move(ws.noise.eps), ws.noise.radius, Tensor{}});
    }
  }
  return noise;
}

Var per_example_nll(Tape& tape, const BayesianMlp& model, std::span<const Var> weights, const Dataset& batch,
                    std::span<const std::size_t> allowed_classes) {
  Var out = numcore::mlp_forward(weights, model.activation, tape.constant(batch.x));
  if (model.head.kind == HeadKind::regressor) return ad::gaussian_nll(out, batch.targets, model.head.sigma_obs);
  return ad::softmax_cross_entropy(out, batch.labels, allowed_classes);
}

ElboGraph build_elbo(Tape& tape, const BayesianMlp& model, const Dataset& batch, const Prior& prior,
                     const Noise& noise, const ElboOptions& opts) {
  const std::size_t n = batch.size();
  const std::size_t n_layers = model.layers.size();
  const bool dropout = model.posterior.tag == PosteriorTag::mc_dropout;
  if (!opts.mean_only) {
    if (prior.layers.size() != n_layers) throw DimensionError("prior does not match the model depth");
    if (prior.kind == PriorKind::radial && model.posterior.tag != PosteriorTag::radial) {
      throw InvalidArgument("a radial prior requires a radial posterior");
    }
    if (noise.samples() == 0) throw InvalidArgument("ELBO needs at least one noise draw");
  }
  if (!opts.weights.empty() && opts.weights.size() != n) throw DimensionError("per-example weights do not match batch");
  if (n == 0 && opts.weights.empty() && opts.n_total > 0.0) throw InvalidArgument("empty batch with dataset scaling");

  ElboGraph g;
  std::vector<Var> sigma;
  for (const auto& l : model.layers) {
    g.mu.push_back(tape.leaf(l.mu));
    g.rho.push_back(tape.leaf(l.rho));
    sigma.push_back(ad::softplus(g.rho.back()));
  }

  const std::size_t samples = opts.mean_only ? 1 : noise.samples();
  std::vector<double> w(n, 1.0);
  if (!opts.weights.empty()) w.assign(opts.weights.begin(), opts.weights.end());
  const double scale = n == 0 ? 0.0 : (opts.n_total > 0.0 ? opts.n_total : static_cast<double>(n)) / static_cast<double>(n);
  for (auto& v : w) v *= scale / static_cast<double>(samples);

  Var nll_total;
  Var radial_ce_total;
  bool have_nll = false, have_radial = false;
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<Var> weights;
    for (std::size_t l = 0; l < n_layers; ++l) {
      if (opts.mean_only) {
        weights.push_back(g.mu[l]);
        continue;
      }
      const LayerNoise& ln = noise.draws[s][l];
      if (dropout) {
        if (ln.mask.empty()) {
          weights.push_back(g.mu[l]);
        } else {
          Tensor m = Tensor::zeros_like(model.layers[l].mu);
          for (std::size_t r = 0; r < m.rows(); ++r)
            for (auto& v : m.row(r)) v = ln.mask[r];
          weights.push_back(ad::mul_const(g.mu[l], m));
        }
        continue;
      }
      Tensor direction = ln.eps;
      if (model.posterior.tag == PosteriorTag::radial) {
        double nrm = 0.0;
        for (double v : ln.eps.data()) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (auto& v : direction.data()) v = v / nrm * ln.radius;
      }
      Var wl = ad::add(g.mu[l], ad::mul_const(sigma[l], direction));
      weights.push_back(wl);
      if (prior.kind == PriorKind::radial) {
        Var ce = radial_prior_ce_sample(wl, prior.layers[l]);
        radial_ce_total = have_radial ? ad::add(radial_ce_total, ce) : ce;
        have_radial = true;
      }
    }
    if (n == 0) continue;
    Var losses = per_example_nll(tape, model, weights, batch, opts.allowed_classes);
    Var term = ad::dot_const(losses, w);
    nll_total = have_nll ? ad::add(nll_total, term) : term;
    have_nll = true;
  }
  g.nll = have_nll ? nll_total : tape.constant(Tensor::scalar(0.0));

  if (opts.mean_only) {
    g.prior_cross_entropy = tape.constant(Tensor::scalar(0.0));
    g.entropy = tape.constant(Tensor::scalar(0.0));
  } else {
    Var ce_total, h_total;
    for (std::size_t l = 0; l < n_layers; ++l) {
      const auto& layer = model.layers[l];
      Var ce;
      if (prior.kind == PriorKind::gaussian) {
        ce = gaussian_prior_ce(g.mu[l], sigma[l], prior.layers[l], second_moment_factor(model.posterior, layer.size()));
      }
      Var h = layer_entropy(sigma[l], model.posterior, layer.size());
      if (l == 0) {
        if (prior.kind == PriorKind::gaussian) ce_total = ce;
        h_total = h;
      } else {
        if (prior.kind == PriorKind::gaussian) ce_total = ad::add(ce_total, ce);
        h_total = ad::add(h_total, h);
      }
    }
    if (prior.kind == PriorKind::radial) ce_total = ad::scale(radial_ce_total, 1.0 / static_cast<double>(samples));
    g.prior_cross_entropy = ce_total;
    g.entropy = h_total;
  }
  g.kl = ad::sub(g.prior_cross_entropy, g.entropy);
  g.loss = ad::add(g.nll, ad::scale(g.kl, opts.mean_only ? 0.0 : opts.kl_scale));

  check_finite(g.nll.value().item(), "nll");
  check_finite(g.prior_cross_entropy.value().item(), "prior_cross_entropy");
  check_finite(g.entropy.value().item(), "entropy");
  check_finite(g.loss.value().item(), "loss");
  return g;
}

ElboBreakdown elbo(const BayesianMlp& model, const Dataset& batch, const Prior& prior, const Noise& noise,
                   const ElboOptions& opts) {
  Tape tape;
  ElboGraph g = build_elbo(tape, model, batch, prior, noise, opts);
  return {g.nll.value().item(), g.prior_cross_entropy.value().item(), g.entropy.value().item(), g.loss.value().item()};
}

ElboBreakdown elbo(const BayesianMlp& model, const Dataset& batch, const Prior& prior, std::size_t samples,
                   const ElboOptions& opts, RngStream& rng) {
  Noise noise = opts.mean_only ? Noise{} : draw_noise(model, samples, rng);
  return elbo(model, batch, prior, noise, opts);
}

std::vector<double> flatten_params(const BayesianMlp& model) {
  std::vector<double> out;
  for (const auto& l : model.layers) {
    out.insert(out.end(), l.mu.data().begin(), l.mu.data().end());
    out.insert(out.end(), l.rho.data().begin(), l.rho.data().end());
  }
  return out;
}

void unflatten_params(BayesianMlp& model, std::span<const double> flat) {
  std::size_t k = 0;
  for (auto& l : model.layers) {
    for (auto& v : l.mu.data()) v = flat[k++];
    for (auto& v : l.rho.data()) v = flat[k++];
  }
  if (k != flat.size()) throw DimensionError("unflatten_params: length mismatch");
}

}  // namespace evalbench::bnn
