#include "evalbench/cli/experiments.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "evalbench/active/run.hpp"
#include "evalbench/bnn/probe.hpp"
#include "evalbench/geometry/product.hpp"
#include "evalbench/numcore/autodiff.hpp"
#include "evalbench/numcore/error.hpp"
#include "evalbench/posteriors/divergences.hpp"
#include "evalbench/posteriors/samplers.hpp"
#include "evalbench/stats/stats.hpp"

namespace evalbench::cli {

namespace {

using numcore::RngStream;

// FNV-1a, used to name RNG streams.
std::uint64_t stream_id(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::filesystem::path data_file(const std::string& name) {
  if (name.empty()) throw InvalidArgument("mnist dataset needs images/labels file names");
  const char* dir = std::getenv("EVALBENCH_DATA_DIR");
  const std::filesystem::path p = dir ? std::filesystem::path(dir) / name : std::filesystem::path(name);
  if (!std::filesystem::exists(p))
    throw InvalidArgument("IDX file not found: " + p.string() + " (set EVALBENCH_DATA_DIR)");
  return p;
}

ExperimentRecord rec(const RunConfig& cfg, const std::string& method, const std::string& tag, std::int64_t step,
                     const std::string& metric, double value, std::uint64_t seed) {
  return {to_string(cfg.kind), method, tag, step, metric, value, seed};
}

std::vector<ExperimentRecord> continual_cell(const RunConfig& cfg, std::uint64_t seed, const std::string& cell) {
  const auto slash = cell.find('/');
  const std::string method = cell.substr(0, slash), protocol = cell.substr(slash + 1);
  const continual::TaskStream stream = make_stream(cfg, seed);
  const continual::ContinualResult r = continual::run_continual(stream, continual_config(cfg, seed, method, protocol));
  std::vector<ExperimentRecord> out;
  for (std::size_t t = 0; t < r.accuracy.size(); ++t) {
    const auto step = static_cast<std::int64_t>(t);
    for (std::size_t j = 0; j <= t; ++j)
      out.push_back(rec(cfg, method, protocol, step, "accuracy_task" + std::to_string(j), r.accuracy[t][j], seed));
    out.push_back(rec(cfg, method, protocol, step, "average_accuracy", r.average[t], seed));
  }
  for (std::size_t t = 0; t < r.boundary_entropy.size(); ++t)
    out.push_back(rec(cfg, method, protocol, static_cast<std::int64_t>(t), "boundary_entropy", r.boundary_entropy[t], seed));
  for (std::size_t t = 0; t < r.gradient_ratio.size(); ++t) {
    const auto& g = r.gradient_ratio[t];
    const auto step = static_cast<std::int64_t>(t);
    out.push_back(rec(cfg, method, protocol, step, "nll_grad_norm", g.nll_norm, seed));
    out.push_back(rec(cfg, method, protocol, step, "prior_grad_norm", g.prior_norm, seed));
    if (g.prior_norm > 0.0) out.push_back(rec(cfg, method, protocol, step, "gradient_ratio", g.ratio(), seed));
  }
  return out;
}

active::ActiveLearningConfig al_config(const RunConfig& cfg, std::uint64_t seed, const std::string& proposal) {
  const ActiveSpec& a = cfg.active;
  active::ActiveLearningConfig c;
  c.proposal.kind = active::parse_proposal(proposal);
  c.proposal.temperature = a.temperature;
  c.proposal.epsilon = a.epsilon;
  c.proposal.beta = a.beta;
  c.estimators.clear();
  for (const auto& e : a.estimators) c.estimators.push_back(active::parse_estimator(e));
  c.m_max = a.m_max;
  c.start_points = a.start_points;
  c.retrain_every = a.retrain_every;
  c.checkpoint_every = a.checkpoint_every;
  c.scoring_estimator = active::parse_estimator(a.scoring_estimator);
  c.seed = seed;
  return c;
}

std::vector<ExperimentRecord> active_learn_cell(const RunConfig& cfg, std::uint64_t seed, const std::string& proposal) {
  const DataPair d = make_dataset(cfg.dataset, seed);
  const auto learner = make_learner(cfg.model);
  const auto r = active::active_learning_run(*learner, d.train, d.test, al_config(cfg, seed, proposal));
  std::vector<ExperimentRecord> out;
  for (const auto& p : r.curve) {
    const std::string e = active::to_string(p.estimator);
    const auto step = static_cast<std::int64_t>(p.m);
    out.push_back(rec(cfg, proposal, e, step, "test_loss", p.test_loss, seed));
    if (std::isfinite(p.test_accuracy)) out.push_back(rec(cfg, proposal, e, step, "test_accuracy", p.test_accuracy, seed));
    out.push_back(rec(cfg, proposal, e, step, "negative_weights", static_cast<double>(p.negative_weights), seed));
  }
  return out;
}

std::vector<ExperimentRecord> active_test_cell(const RunConfig& cfg, std::uint64_t seed, const std::string& proposal) {
  const auto curve = active_test_curve(cfg, seed, proposal);
  std::vector<ExperimentRecord> out;
  for (std::size_t m = 0; m < curve.mse.size(); ++m) {
    const auto step = static_cast<std::int64_t>(m + 1);
    out.push_back(rec(cfg, proposal, "r_lure", step, "mse", curve.mse[m], seed));
    out.push_back(rec(cfg, proposal, "r_lure", step, "median_sq_error", curve.median_sq_error[m], seed));
  }
  return out;
}

std::vector<ExperimentRecord> bias_cell(const RunConfig& cfg, std::uint64_t seed, const std::string& proposal) {
  std::vector<ExperimentRecord> out;
  for (const auto& c : bias_curves(cfg, seed, proposal)) {
    const std::string e = active::to_string(c.estimator);
    for (std::size_t m = 0; m < c.bias.size(); ++m) {
      const auto step = static_cast<std::int64_t>(m + 1);
      out.push_back(rec(cfg, proposal, e, step, "bias", c.bias[m], seed));
      out.push_back(rec(cfg, proposal, e, step, "bias_se", c.std_error[m], seed));
      out.push_back(rec(cfg, proposal, e, step, "variance", c.variance[m], seed));
    }
  }
  return out;
}

std::vector<ExperimentRecord> ofb_cell(const RunConfig& cfg, std::uint64_t seed, const std::string& method) {
  const OfbAlb r = ofb_alb_probe(cfg, seed);
  const auto step = static_cast<std::int64_t>(r.m);
  return {rec(cfg, method, "r_tilde", step, "pool_risk", r.pool_risk, seed),
          rec(cfg, method, "r_tilde", step, "train_tilde", r.train_tilde, seed),
          rec(cfg, method, "r_tilde", step, "train_lure", r.train_lure, seed),
          rec(cfg, method, "r_tilde", step, "ofb", r.ofb, seed),
          rec(cfg, method, "r_tilde", step, "test_risk", r.test_risk, seed),
          rec(cfg, method, "r_tilde", step, "alb", r.alb, seed),
          rec(cfg, method, "r_tilde", step, "alb_se", r.alb_se, seed)};
}

double worst_z(const geometry::CovarianceTable& analytic, const geometry::McCovariance& mc, double* frac_within) {
  double worst = 0.0;
  std::size_t within = 0;
  const auto& a = analytic.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double se = mc.std_error.values()[i];
    const double diff = std::abs(a[i] - mc.cov.values()[i]);
    const double z = se > 0 ? diff / se : (diff == 0 ? 0.0 : 1e300);
    worst = std::max(worst, z);
    within += z < 4.0;
  }
  *frac_within = static_cast<double>(within) / static_cast<double>(a.size());
  return worst;
}

std::vector<ExperimentRecord> geometry_cell(const RunConfig& cfg, std::uint64_t seed, const std::string& method) {
  const GeometrySpec& g = cfg.geometry;
  RngStream rng(seed, stream_id("geometry"));
  std::vector<ExperimentRecord> out;
  for (std::size_t depth : g.depths) {
    const auto step = static_cast<std::int64_t>(depth);
    const auto stack = geometry::LayerStack::random(std::vector<std::size_t>(depth + 1, g.width), rng, g.std_scale);
    const auto analytic = geometry::analytic_cov_recursive(stack);
    const auto mc = geometry::mc_cov(stack, g.samples, rng);
    double within = 0.0;
    out.push_back(rec(cfg, method, "analytic_vs_mc", step, "max_abs_z", worst_z(analytic, mc, &within), seed));
    out.push_back(rec(cfg, method, "analytic_vs_mc", step, "frac_within_4se", within, seed));
    if (depth == 2) {
      double off = 0.0;
      const std::size_t n = g.width;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c)
            for (std::size_t d = 0; d < n; ++d)
              if (a != c && b != d) off = std::max(off, std::abs(analytic(a, b, c, d)));
      out.push_back(rec(cfg, method, "analytic", step, "max_off_row_col", off, seed));
    } else {
      auto positive = stack;
      for (auto& l : positive.layers)
        for (auto& v : l.mean.data()) v = 0.1 + rng.uniform();
      const auto t = geometry::analytic_cov_recursive(positive);
      out.push_back(rec(cfg, method, "analytic_positive_means", step, "min_cov",
                        *std::min_element(t.values().begin(), t.values().end()), seed));
    }
  }
  numcore::Tensor a({g.width, g.width}), b({g.width, g.width}), c({g.width, g.width});
  for (auto* m : {&a, &b, &c})
    for (auto& v : m->data()) v = rng.normal();
  out.push_back(rec(cfg, method, "mvg", 0, "residual", geometry::mvg_check(a, b, c).residual, seed));
  return out;
}

std::vector<ExperimentRecord> soap_cell(const RunConfig& cfg, std::uint64_t seed, const std::string& method) {
  const SoapSpec& s = cfg.soap;
  const bool radial = method == "radial";
  RngStream rng(seed, stream_id("soap/" + method));
  std::vector<ExperimentRecord> out;
  for (std::size_t d : s.dims) {
    const auto step = static_cast<std::int64_t>(d);
    const auto layer = posteriors::MeanFieldLayer::with_sigma(numcore::Tensor({1, d}, 0.0), s.sigma);
    std::vector<double> norms;
    for (std::size_t i = 0; i < s.samples; ++i) {
      const auto w = radial ? posteriors::sample_radial(layer, rng) : posteriors::sample_gaussian(layer, rng);
      double sq = 0.0;
      for (double v : w.values.data()) sq += v * v;
      norms.push_back(std::sqrt(sq));
    }
    const double med = stats::median(norms);
    const double iqr = stats::quantile(norms, 0.75) - stats::quantile(norms, 0.25);
    const double sigma = s.sigma;
    const auto ks = radial ? stats::ks_one_sample(norms, [sigma](double r) { return std::erf(r / (sigma * std::sqrt(2.0))); })
                           : stats::ks_one_sample(norms, [sigma, d](double r) {
                               return boost::math::gamma_p(0.5 * static_cast<double>(d), 0.5 * r * r / (sigma * sigma));
                             });
    out.push_back(rec(cfg, method, "norm", step, "norm_median", med, seed));
    out.push_back(rec(cfg, method, "norm", step, "norm_rel_iqr", iqr / med, seed));
    out.push_back(rec(cfg, method, "norm", step, "ks_stat", ks.statistic, seed));
    out.push_back(rec(cfg, method, "norm", step, "ks_p", ks.p_value, seed));
    if (!radial) {
      out.push_back(rec(cfg, method, "radius_pdf", step, "mode_analytic", s.sigma * std::sqrt(static_cast<double>(d - 1)), seed));
      const auto best = boost::math::tools::brent_find_minima(
          [&](double r) { return -std::log(posteriors::gaussian_radius_pdf(r, d, s.sigma)); }, 1e-6 * s.sigma,
          2.0 * s.sigma * std::sqrt(static_cast<double>(d)) + s.sigma, 52);
      out.push_back(rec(cfg, method, "radius_pdf", step, "mode_numeric", best.first, seed));
    }
  }
  // gradient spread of the two terms against the posterior scale
  const DataPair data = make_dataset(cfg.dataset, seed);
  if (s.grad_widths.size() < 2 || data.train.dim() != s.grad_widths.front() ||
      data.train.num_classes != s.grad_widths.back())
    throw InvalidArgument("soapbubble.grad_widths must start at the dataset dim and end at its class count");
  const std::size_t rows = std::min<std::size_t>(64, data.train.size());
  std::vector<std::size_t> idx(rows);
  std::iota(idx.begin(), idx.end(), 0);
  const Dataset batch = data.train.subset(idx);
  RngStream init(seed, stream_id("soap/init"));
  const auto base = bnn::BayesianMlp::create(s.grad_widths, bnn::PosteriorKind::gaussian(), activation(cfg.model),
                                             bnn::Head::classifier(), init);
  for (std::size_t i = 0; i < s.grad_sigmas.size(); ++i) {
    auto model = base;
    model.posterior = radial ? bnn::PosteriorKind::radial() : bnn::PosteriorKind::gaussian();
    for (auto& l : model.layers) l.rho = numcore::Tensor(l.rho.shape(), numcore::inverse_softplus(s.grad_sigmas[i]));
    RngStream probe(seed, stream_id("soap/probe") + i);
    const auto r = bnn::grad_variance_probe(model, batch, bnn::Prior::isotropic(model), s.probes, probe);
    const auto step = static_cast<std::int64_t>(i);
    out.push_back(rec(cfg, method, "gradient", step, "sigma", s.grad_sigmas[i], seed));
    out.push_back(rec(cfg, method, "gradient", step, "nll_grad_std", r.nll.std, seed));
    out.push_back(rec(cfg, method, "gradient", step, "kl_grad_std", r.kl.std, seed));
    out.push_back(rec(cfg, method, "gradient", step, "nll_grad_mean_norm", r.nll.mean_norm, seed));
  }
  return out;
}

}  // namespace

DataPair make_dataset(const DatasetSpec& s, std::uint64_t seed) {
  RngStream rng(seed, stream_id("data"));
  DataPair d;
  if (s.name == "toy_regression") {
    d.train = data::toy_regression(s.clusters, rng);
    std::vector<std::size_t> big;
    for (auto c : s.clusters) big.push_back(c * s.test_scale);
    d.test = data::toy_regression(big, rng);
  } else if (s.name == "blobs") {
    d.train = data::blobs(s.n_per_class, s.classes, s.dim, s.separation, rng);
    d.test = data::blobs(s.test_per_class, s.classes, s.dim, s.separation, rng);
  } else if (s.name == "prototype_blobs") {
    d.train = data::prototype_blobs(s.n_per_class, s.classes, s.dim, s.active, s.separation, s.prototype_seed + seed, rng);
    d.test = data::prototype_blobs(s.test_per_class, s.classes, s.dim, s.active, s.separation, s.prototype_seed + seed, rng);
  } else if (s.name == "two_moons") {
    d.train = data::two_moons(s.train_size, s.noise, rng);
    d.test = data::two_moons(s.test_size, s.noise, rng);
  } else if (s.name == "mnist") {
    d.train = data::load_idx(data_file(s.images), data_file(s.labels), s.normalize);
    d.test = data::load_idx(data_file(s.test_images), data_file(s.test_labels), s.normalize);
  } else {
    throw InvalidArgument("unknown dataset '" + s.name + "'");
  }
  return d;
}

bnn::TrainConfig train_config(const ModelSpec& m) {
  bnn::TrainConfig c;
  c.epochs = m.epochs;
  c.batch_size = m.batch_size;
  c.learning_rate = m.learning_rate;
  c.train_samples = m.train_samples;
  c.test_samples = m.test_samples;
  c.kl_scale = m.kl_scale;
  return c;
}

bnn::PosteriorKind posterior_kind(const ModelSpec& m) {
  if (m.posterior == "gaussian") return bnn::PosteriorKind::gaussian();
  if (m.posterior == "radial") return bnn::PosteriorKind::radial();
  if (m.posterior == "truncated") return bnn::PosteriorKind::truncated(m.truncation);
  if (m.posterior == "mc_dropout") return bnn::PosteriorKind::mc_dropout(m.dropout);
  throw InvalidArgument("unknown posterior '" + m.posterior + "'");
}

numcore::Activation activation(const ModelSpec& m) {
  if (m.activation == "relu") return numcore::Activation::relu();
  if (m.activation == "leaky_relu") return numcore::Activation::leaky();
  if (m.activation == "identity") return numcore::Activation::identity();
  throw InvalidArgument("unknown activation '" + m.activation + "'");
}

active::BnnSpec bnn_spec(const ModelSpec& m) {
  active::BnnSpec s;
  s.hidden = m.hidden;
  s.posterior = posterior_kind(m);
  s.activation = activation(m);
  s.prior_sigma = m.prior_sigma;
  s.rho_init = m.rho_init;
  s.train = train_config(m);
  s.acquisition_samples = m.acquisition_samples;
  s.test_samples = m.test_samples;
  return s;
}

std::unique_ptr<active::Learner> make_learner(const ModelSpec& m) {
  if (m.learner == "linear") return std::make_unique<active::LinearRegressionLearner>();
  return std::make_unique<active::BnnLearner>(bnn_spec(m));
}

continual::ContinualConfig continual_config(const RunConfig& cfg, std::uint64_t seed, const std::string& method,
                                            const std::string& protocol) {
  continual::ContinualConfig c = continual::default_config();
  c.method = continual::parse_method(method);
  c.protocol = continual::parse_protocol(protocol);
  c.hidden = cfg.model.hidden;
  c.posterior = posterior_kind(cfg.model);
  c.activation = activation(cfg.model);
  c.prior_sigma = cfg.model.prior_sigma;
  c.rho_init = cfg.model.rho_init;
  c.train = train_config(cfg.model);
  c.finetune = c.train;
  c.finetune.epochs = cfg.continual.finetune_epochs;
  c.coreset_size = cfg.continual.coreset_size;
  c.ewc_lambda = cfg.continual.ewc_lambda;
  c.test_samples = cfg.model.test_samples;
  c.probes = cfg.continual.probes;
  c.seed = seed;
  return c;
}

continual::TaskStream make_stream(const RunConfig& cfg, std::uint64_t seed) {
  const DataPair d = make_dataset(cfg.dataset, seed);
  if (d.train.num_classes == 0) throw InvalidArgument("continual runs need a classification dataset");
  if (cfg.continual.stream == "permuted") {
    RngStream rng(seed, stream_id("permute"));
    return continual::make_permuted_stream(d.train, d.test, cfg.continual.tasks, rng);
  }
  auto groups = continual::consecutive_pairs(d.train.num_classes);
  if (cfg.continual.tasks == 0 || cfg.continual.tasks > groups.size())
    throw InvalidArgument("continual.tasks must lie in [1, classes / 2] for split streams");
  groups.resize(cfg.continual.tasks);
  return continual::make_split_stream(d.train, d.test, groups);
}

namespace {

FixedModel fixed_on(const RunConfig& cfg, const Dataset& fit_on, const Dataset& pool, std::uint64_t seed) {
  FixedModel f;
  f.model = make_learner(cfg.model)->fit(fit_on, {}, numcore::mix64(seed ^ stream_id("fixed")));
  f.pool_losses = f.model->losses(pool);
  RngStream rng(seed, stream_id("scores"));
  f.pool_scores = f.model->scores(pool.x, rng);
  return f;
}

active::ProposalRule rule_for(const RunConfig& cfg, const std::string& proposal, const Dataset& pool,
                              const FixedModel& fixed, std::uint64_t seed) {
  const ActiveSpec& a = cfg.active;
  const bool testing = cfg.kind == ExperimentKind::active_test;
  if (proposal == "uniform") return active::uniform_rule();
  if (proposal == "bald") {
    if (testing) return active::static_proportional_rule(fixed.pool_scores, a.floor);
    return active::static_boltzmann_rule(fixed.pool_scores, a.temperature);
  }
  if (proposal == "shuffled") {
    RngStream rng(seed, stream_id("shuffle"));
    const auto perm = numcore::permutation(rng, fixed.pool_scores.size());
    std::vector<double> s(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) s[i] = fixed.pool_scores[perm[i]];
    return active::static_proportional_rule(std::move(s), a.floor);
  }
  if (proposal == "loss_boltzmann") return active::static_boltzmann_rule(fixed.pool_losses, a.temperature);
  if (proposal == "distance_boltzmann") return active::distance_boltzmann_rule(pool.x, a.beta);
  if (proposal == "epsilon_greedy") return active::epsilon_greedy_rule(pool.x, a.epsilon);
  throw InvalidArgument("unknown proposal '" + proposal + "'");
}

std::size_t clamp_m(std::size_t m, std::size_t n) { return m == 0 || m > n ? n : m; }

}  // namespace

FixedModel fit_fixed_model(const RunConfig& cfg, const DataPair& data, std::uint64_t seed) {
  return fixed_on(cfg, data.train, data.test, seed);
}

active::ProposalRule make_rule(const RunConfig& cfg, const std::string& proposal, const DataPair& data,
                               const FixedModel& fixed, std::uint64_t seed) {
  return rule_for(cfg, proposal, data.test, fixed, seed);
}

active::ActiveTestingCurve active_test_curve(const RunConfig& cfg, std::uint64_t seed, const std::string& proposal) {
  const DataPair d = make_dataset(cfg.dataset, seed);
  const FixedModel fixed = fixed_on(cfg, d.train, d.test, seed);
  const auto rule = rule_for(cfg, proposal, d.test, fixed, seed);
  RngStream rng(seed, stream_id("active-test/" + proposal));
  return active::active_testing_run(fixed.pool_losses, rule, clamp_m(cfg.active.m_max, d.test.size()),
                                    cfg.active.trajectories, rng);
}

std::vector<active::BiasCurve> bias_curves(const RunConfig& cfg, std::uint64_t seed, const std::string& proposal) {
  // the pool is the train split and the fixed model is fitted on all of it
  const DataPair d = make_dataset(cfg.dataset, seed);
  const FixedModel fixed = fixed_on(cfg, d.train, d.train, seed);
  const auto rule = rule_for(cfg, proposal, d.train, fixed, seed);
  RngStream rng(seed, stream_id("bias/" + proposal));
  return active::bias_probe(fixed.pool_losses, rule, clamp_m(cfg.active.m_max, d.train.size()),
                            cfg.active.trajectories, rng);
}

OfbAlb ofb_alb_probe(const RunConfig& cfg, std::uint64_t seed) {
  const DataPair d = make_dataset(cfg.dataset, seed);
  const auto learner = make_learner(cfg.model);
  RunConfig al = cfg;
  al.active.estimators = {"r_tilde"};
  al.active.checkpoint_every = std::max<std::size_t>(1, cfg.active.m_max);
  const auto run = active::active_learning_run(*learner, d.train, d.test, al_config(al, seed, "boltzmann"));
  const auto& traj = run.trajectory;
  const std::size_t n = d.train.size();

  const auto theta = learner->fit(d.train.subset(traj.indices), {}, numcore::mix64(seed ^ stream_id("theta*")));
  const auto pool_losses = theta->losses(d.train);
  const auto train_losses = active::gather(pool_losses, traj.indices);
  OfbAlb r;
  r.m = traj.size();
  r.pool_risk = active::pool_risk(pool_losses);
  r.train_tilde = active::r_tilde(train_losses).value;
  r.train_lure = active::r_lure(train_losses, traj.q, n).value;
  r.ofb = active::overfitting_bias(r.pool_risk, train_losses, traj.q, n);

  const auto test_losses = theta->losses(d.test);
  RngStream srng(seed, stream_id("ofb/scores"));
  const auto scores = theta->scores(d.test.x, srng);
  r.test_risk = active::pool_risk(test_losses);
  RngStream brng(seed, stream_id("ofb/alb"));
  const auto curves = active::bias_probe(test_losses, active::static_boltzmann_rule(scores, cfg.active.temperature),
                                         r.m, cfg.active.trajectories, brng);
  for (const auto& c : curves)
    if (c.estimator == active::Estimator::r_tilde) {
      r.alb = -c.bias[r.m - 1];
      r.alb_se = c.std_error[r.m - 1];
    }
  return r;
}

std::vector<ExperimentRecord> run_cell(const RunConfig& cfg, std::uint64_t seed, const std::string& method) {
  switch (cfg.kind) {
    case ExperimentKind::continual: return continual_cell(cfg, seed, method);
    case ExperimentKind::active_learn: return active_learn_cell(cfg, seed, method);
    case ExperimentKind::active_test: return active_test_cell(cfg, seed, method);
    case ExperimentKind::bias_probe: return bias_cell(cfg, seed, method);
    case ExperimentKind::ofb_probe: return ofb_cell(cfg, seed, method);
    case ExperimentKind::geometry_probe: return geometry_cell(cfg, seed, method);
    case ExperimentKind::soapbubble_probe: return soap_cell(cfg, seed, method);
  }
  throw InvalidArgument("unknown experiment kind");
}

}  // namespace evalbench::cli
