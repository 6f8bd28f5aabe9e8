// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)
// Exit status is 0 when every selected criterion ran to completion; with
// EVALBENCH_ACCEPTANCE_STRICT=1 a FAIL line also makes it non-zero.

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "evalbench/active/oracle.hpp"
#include "evalbench/active/run.hpp"
#include "evalbench/active/simulate.hpp"
#include "evalbench/bnn/elbo.hpp"
#include "evalbench/bnn/probe.hpp"
#include "evalbench/cli/config.hpp"
#include "evalbench/cli/experiments.hpp"
#include "evalbench/cli/runner.hpp"
#include "evalbench/continual/run.hpp"
#include "evalbench/geometry/product.hpp"
#include "evalbench/numcore/autodiff.hpp"
#include "evalbench/numcore/gradcheck.hpp"
#include "evalbench/posteriors/divergences.hpp"
#include "evalbench/posteriors/samplers.hpp"
#include "evalbench/stats/stats.hpp"

namespace active = evalbench::active;
namespace bnn = evalbench::bnn;
namespace cli = evalbench::cli;
namespace continual = evalbench::continual;
namespace geometry = evalbench::geometry;
namespace posteriors = evalbench::posteriors;
namespace stats = evalbench::stats;
using evalbench::data::Dataset;
using evalbench::numcore::RngStream;
using evalbench::numcore::Tensor;

namespace {

// ---- pinned tolerances ------------------------------------------------------
constexpr double kUnbiasedTol = 1e-12;       // C1
constexpr double kTildeBiasMin = 1e-6;       // C1
constexpr double kC1Seconds = 30, kC2Seconds = 1, kC3Seconds = 300, kC4Seconds = 600, kC5Seconds = 1200,
                 kC6Seconds = 1800, kC8Seconds = 60, kC9Seconds = 60, kC11Seconds = 300;
constexpr double kAlpha05 = 0.05, kAlpha01 = 0.01;
constexpr double kDebiasFactor = 0.5;        // C4
constexpr double kMagnitudeBand = 10.0;      // C5
constexpr double kChanceBand = 0.1, kCoresetGain = 0.2, kMultiHeadGain = 0.3;  // C6
constexpr double kEntropyRatio = 10.0;       // C7
constexpr double kModeRelTol = 1e-6;         // C8 (Brent on -log pdf)
constexpr double kRelIqrMax = 0.02;          // C8
constexpr double kSeBand9 = 3.0;             // C9
constexpr double kSeBand11 = 4.0;            // C11
constexpr double kMvgResidual = 1e-10;       // C11
constexpr double kMonotoneSlack = 0.05;      // C12
constexpr double kGradTol = 1e-5;            // C13

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

cli::RunConfig config(const std::string& text) { return cli::parse_config(text, true); }

// ---- 1 -----------------------------------------------------------------------
Outcome c1() {
  const auto t0 = Clock::now();
  RngStream rng(101, 0);
  double worst_pure = 0, worst_lure = 0, min_tilde = 1e300, worst_mass = 0;
  std::size_t cases = 0;
  for (std::size_t n = 2; n <= 6; ++n)
    for (std::size_t inst = 0; inst < 50; ++inst) {
      // stratified losses keep the pool values apart
      std::vector<double> losses(n);
      for (std::size_t i = 0; i < n; ++i) losses[i] = (static_cast<double>(i) + rng.uniform()) / static_cast<double>(n);
      const auto perm = evalbench::numcore::permutation(rng, n);
      std::vector<double> shuffled(n);
      for (std::size_t i = 0; i < n; ++i) shuffled[i] = losses[perm[i]];
      losses = shuffled;
      std::vector<double> scores(n);
      for (auto& s : scores) s = rng.normal();
      const double temp = 0.2 + 3.0 * rng.uniform();
      const active::ProposalRule random_rule = active::static_boltzmann_rule(scores, temp);
      const active::ProposalRule loss_rule = active::static_proportional_rule(losses, 0.1);
      const double r = active::pool_risk(losses);
      for (std::size_t m = 1; m <= n; ++m) {
        for (const auto* rule : {&random_rule, &loss_rule}) {
          const auto p = active::enumerate_expectation(losses, *rule, m, active::Estimator::r_pure);
          const auto l = active::enumerate_expectation(losses, *rule, m, active::Estimator::r_lure);
          worst_pure = std::max(worst_pure, std::abs(p.mean - r));
          worst_lure = std::max(worst_lure, std::abs(l.mean - r));
          worst_mass = std::max(worst_mass, std::abs(p.total_probability - 1.0));
          ++cases;
        }
        if (m < n) {
          const auto t = active::enumerate_expectation(losses, loss_rule, m, active::Estimator::r_tilde);
          min_tilde = std::min(min_tilde, t.mean - r);
        }
      }
    }
  const double secs = seconds_since(t0);
  const bool ok = worst_pure <= kUnbiasedTol && worst_lure <= kUnbiasedTol && min_tilde > kTildeBiasMin &&
                  worst_mass <= kUnbiasedTol && secs < kC1Seconds;
  return {ok, std::to_string(cases) + " (rule, N, M, instance) cases; max|E[PURE]-r|=" + fmt(worst_pure) +
                  " max|E[LURE]-r|=" + fmt(worst_lure) + " (tol 1e-12); min E[R~]-r on loss-correlated M<N=" +
                  fmt(min_tilde) + " (need > 1e-6); " + fmt(secs, 3) + " s (< 30)"};
}

// ---- 2 -----------------------------------------------------------------------
Outcome c2() {
  const auto t0 = Clock::now();
  bool full_exact = true, uniform_exact = true;
  RngStream rng(102, 0);
  for (std::size_t n : {1, 2, 7, 50, 101}) {
    std::vector<double> losses(n), scores(n);
    for (auto& v : losses) v = rng.uniform() * 3.0;
    for (auto& v : scores) v = rng.normal();
    const double r = active::pool_risk(losses);
    RngStream sim(103, n);
    const auto est = active::simulate_trajectories(losses, active::static_boltzmann_rule(scores, 2.0), n, 20, sim);
    for (std::size_t t = 0; t < 20; ++t) full_exact = full_exact && est.lure.at(t, n - 1) == r;
    RngStream uni(104, n);
    const auto u = active::simulate_trajectories(losses, active::uniform_rule(), n, 20, uni);
    uniform_exact = uniform_exact && std::ranges::equal(u.lure.data(), u.tilde.data());
  }
  const double secs = seconds_since(t0);
  return {full_exact && uniform_exact && secs < kC2Seconds,
          std::string("M=N LURE == pool mean bitwise: ") + (full_exact ? "yes" : "no") +
              "; uniform LURE == R~ bitwise: " + (uniform_exact ? "yes" : "no") + "; " + fmt(secs, 3) + " s (< 1)"};
}

// ---- 3 -----------------------------------------------------------------------
Outcome c3() {
  const auto t0 = Clock::now();
  cli::DatasetSpec spec;
  spec.name = "toy_regression";  // clusters 5/48/48
  const auto d = cli::make_dataset(spec, 0);
  const auto fit = active::LinearRegressionLearner().fit(d.train, {}, 0);
  const auto losses = fit->losses(d.train);
  const double r = active::pool_risk(losses);

  std::string violations;
  double worst_gap = -1e300;  // max of Var(LURE) - Var(PURE) over subsets and M
  RngStream pick(105, 0);
  for (int sub = 0; sub < 10; ++sub) {
    auto perm = evalbench::numcore::permutation(pick, d.train.size());
    perm.resize(6);
    const Dataset small = d.train.subset(perm);
    const auto sl = active::gather(losses, perm);
    const auto rule = active::distance_boltzmann_rule(small.x, 1.0);
    for (std::size_t m = 2; m <= 6; ++m) {
      const double vp = active::enumerate_expectation(sl, rule, m, active::Estimator::r_pure).variance;
      const double vl = active::enumerate_expectation(sl, rule, m, active::Estimator::r_lure).variance;
      worst_gap = std::max(worst_gap, vl - vp);
      if (vl > vp) violations += " s" + std::to_string(sub) + "/M" + std::to_string(m);
    }
  }

  RngStream sim(106, 0);
  const auto est = active::simulate_trajectories(losses, active::distance_boltzmann_rule(d.train.x, 1.0), 50, 1000, sim);
  bool mc_ok = true;
  std::string ps;
  for (std::size_t m : {10, 30, 50}) {
    std::vector<double> diff(1000);
    for (std::size_t t = 0; t < 1000; ++t) {
      const double el = est.lure.at(t, m - 1) - r, ep = est.pure.at(t, m - 1) - r;
      diff[t] = el * el - ep * ep;
    }
    const auto test = stats::t_less_than_zero(diff);
    mc_ok = mc_ok && test.p_value < kAlpha05;
    ps += " m=" + std::to_string(m) + ":p=" + fmt(test.p_value, 3);
  }
  const double secs = seconds_since(t0);
  return {violations.empty() && mc_ok && secs < kC3Seconds,
          "N=6 enumeration over 10 subsets, M=2..6: max Var(LURE)-Var(PURE)=" + fmt(worst_gap) + " (need <= 0" +
              (violations.empty() ? "" : "; violated at" + violations) + ")" +
              "; N=101 MC 1000 trajectories, one-sided t on squared-error difference:" + ps + " (< 0.05); " +
              fmt(secs, 3) + " s"};
}

// ---- 4 -----------------------------------------------------------------------
Outcome c4() {
  const auto t0 = Clock::now();
  cli::DatasetSpec spec;
  spec.name = "toy_regression";
  const auto d = cli::make_dataset(spec, 0);
  const active::LinearRegressionLearner learner;
  const double floor_loss = active::pool_risk(learner.fit(d.train, {}, 0)->losses(d.test));
  std::vector<double> tilde, lure;
  for (std::uint64_t t = 0; t < 100; ++t) {
    active::ActiveLearningConfig cfg;
    cfg.proposal.kind = active::ProposalKind::distance_boltzmann;
    cfg.proposal.beta = 1.0;
    cfg.estimators = {active::Estimator::r_tilde, active::Estimator::r_lure};
    cfg.start_points = 10;
    cfg.m_max = 20;
    cfg.checkpoint_every = 20;
    cfg.seed = t;
    for (const auto& p : active::active_learning_run(learner, d.train, d.test, cfg).curve) {
      if (p.m != 30) continue;
      (p.estimator == active::Estimator::r_lure ? lure : tilde).push_back(p.test_loss);
    }
  }
  const double mt = stats::median(tilde), ml = stats::median(lure);
  const double secs = seconds_since(t0);
  return {tilde.size() == 100 && lure.size() == 100 && ml <= kDebiasFactor * mt && secs < kC4Seconds,
          "median test MSE at M=30 over 100 trajectories: LURE " + fmt(ml) + " vs R~ " + fmt(mt) + " (ratio " +
              fmt(ml / mt, 3) + ", need <= 0.5); excess over the full-pool fit (" + fmt(floor_loss) + "): " +
              fmt(ml - floor_loss) + " vs " + fmt(mt - floor_loss) + " (ratio " +
              fmt((ml - floor_loss) / (mt - floor_loss), 3) + "); " + fmt(secs, 3) + " s"};
}

// ---- 5 -----------------------------------------------------------------------
const char* kOfbConfig = R"(
experiment = "ofb-probe"
seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
[dataset]
name = "prototype_blobs"
classes = 10
n_per_class = 20
test_per_class = 20
dim = 16
active = 8
separation = 8
[model]
hidden = [32]
epochs = 300
kl_scale = 0.01
rho_init = -6
batch_size = 16
learning_rate = 3e-3
test_samples = 10
acquisition_samples = 20
[active]
start_points = 10
m_max = 40
retrain_every = 5
temperature = 20
trajectories = 200
)";

Outcome c5() {
  const auto t0 = Clock::now();
  const auto cfg = config(kOfbConfig);
  std::size_t ofb_pos = 0, alb_neg = 0;
  std::vector<double> ofb, alb;
  for (auto s : cfg.seeds) {
    const auto r = cli::ofb_alb_probe(cfg, s);
    ofb.push_back(r.ofb);
    alb.push_back(r.alb);
    ofb_pos += r.ofb > 0;
    alb_neg += r.alb < 0;
  }
  const auto so = stats::sign_test(ofb_pos, ofb.size()), sa = stats::sign_test(alb_neg, alb.size());
  double mo = 0, ma = 0;
  for (double v : ofb) mo += std::abs(v) / static_cast<double>(ofb.size());
  for (double v : alb) ma += std::abs(v) / static_cast<double>(alb.size());
  const double ratio = mo / ma;
  const double secs = seconds_since(t0);
  const bool ok = so.p_value < kAlpha05 && sa.p_value < kAlpha05 && ratio >= 1.0 / kMagnitudeBand &&
                  ratio <= kMagnitudeBand && secs < kC5Seconds;
  return {ok, "OFB > 0 in " + std::to_string(ofb_pos) + "/10 (p=" + fmt(so.p_value, 3) + "), ALB < 0 in " +
                  std::to_string(alb_neg) + "/10 (p=" + fmt(sa.p_value, 3) + "); mean|OFB|=" + fmt(mo) +
                  " mean|ALB|=" + fmt(ma) + " ratio " + fmt(ratio, 3) + " (need in [0.1, 10]); " + fmt(secs, 3) + " s"};
}

// ---- 6 -----------------------------------------------------------------------
const char* kSplitConfig = R"(
experiment = "continual"
seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
[dataset]
name = "prototype_blobs"
classes = 10
n_per_class = 500
test_per_class = 50
dim = 16
active = 8
separation = 8
[model]
hidden = [32, 32]
rho_init = -3
learning_rate = 3e-3
epochs = 40
[continual]
stream = "split"
tasks = 5
coreset_size = 40
probes = 0
)";

Outcome c6() {
  const auto t0 = Clock::now();
  const auto cfg = config(kSplitConfig);
  std::vector<double> single, coreset, multi;
  for (auto s : cfg.seeds) {
    const auto stream = cli::make_stream(cfg, s);
    single.push_back(continual::run_continual(stream, cli::continual_config(cfg, s, "vcl", "single_head")).average.back());
    coreset.push_back(
        continual::run_continual(stream, cli::continual_config(cfg, s, "vcl_coreset", "single_head")).average.back());
    multi.push_back(continual::run_continual(stream, cli::continual_config(cfg, s, "vcl", "multi_head")).average.back());
  }
  const double a = stats::mean(single), b = stats::mean(coreset), c = stats::mean(multi);
  const double target = 1.0 / static_cast<double>(cfg.continual.tasks);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(a - target) <= kChanceBand && b - a >= kCoresetGain && c - a >= kMultiHeadGain &&
                  secs < kC6Seconds;
  return {ok, "average accuracy after task 5 over 10 seeds: VCL single-head " + fmt(a, 3) + " (final-task-only 1/T=" +
                  fmt(target, 3) + ", band 0.1), VCL+coreset " + fmt(b, 3) + " (+" + fmt(b - a, 3) +
                  ", need >= 0.2), VCL multi-head " + fmt(c, 3) + " (+" + fmt(c - a, 3) + ", need >= 0.3); " +
                  fmt(secs, 3) + " s"};
}

// ---- 7 -----------------------------------------------------------------------
const char* kBoundaryConfig = R"(
experiment = "continual"
seeds = [0]
[dataset]
name = "prototype_blobs"
classes = 10
n_per_class = 1000
test_per_class = 50
dim = 16
active = 8
separation = 8
[model]
hidden = [32, 32]
rho_init = -6
prior_sigma = 10
learning_rate = 1e-3
epochs = 40
[continual]
tasks = 2
probes = 0
)";

Outcome c7() {
  const auto t0 = Clock::now();
  auto cfg = config(kBoundaryConfig);
  cfg.seeds = cli::parse_seed_range("0..19");
  std::size_t wins = 0;
  std::vector<double> perm_h, split_h;
  for (auto s : cfg.seeds) {
    const auto d = cli::make_dataset(cfg.dataset, s);
    const auto split = continual::make_split_stream(d.train, d.test, {{0, 1}, {2, 3}});
    cfg.continual.stream = "permuted";
    const auto permuted = cli::make_stream(cfg, s);
    const auto cc = cli::continual_config(cfg, s, "vcl", "single_head");
    const double hs = continual::run_continual(split, cc).boundary_entropy.at(0);
    const double hp = continual::run_continual(permuted, cc).boundary_entropy.at(0);
    split_h.push_back(hs);
    perm_h.push_back(hp);
    wins += hp / hs > kEntropyRatio;
  }
  const auto st = stats::sign_test(wins, cfg.seeds.size());
  std::vector<double> ratios;
  for (std::size_t i = 0; i < perm_h.size(); ++i) ratios.push_back(perm_h[i] / split_h[i]);
  const double secs = seconds_since(t0);
  return {st.p_value < kAlpha01,
          "ratio > 10 in " + std::to_string(wins) + "/20 seeds (p=" + fmt(st.p_value, 3) +
              ", need < 0.01); median ratio " + fmt(stats::median(ratios), 3) + "; mean entropy permuted " +
              fmt(stats::mean(perm_h), 3) + " vs split " + fmt(stats::mean(split_h), 3) +
              " (reference values 0.45 vs 0.003, not asserted); " + fmt(secs, 3) + " s"};
}

// ---- 8 -----------------------------------------------------------------------
std::vector<double> norms(bool radial, std::size_t d, std::size_t n, double sigma, RngStream& rng) {
  const auto layer = posteriors::MeanFieldLayer::with_sigma(Tensor({1, d}, 0.0), sigma);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = radial ? posteriors::sample_radial(layer, rng) : posteriors::sample_gaussian(layer, rng);
    double sq = 0;
    for (double v : w.values.data()) sq += v * v;
    out.push_back(std::sqrt(sq));
  }
  return out;
}

Outcome c8() {
  const auto t0 = Clock::now();
  double worst_mode = 0;
  for (double sigma : {0.3, 1.0, 2.5})
    for (std::size_t d : {2, 4, 64, 1000, 4096}) {
      const double analytic = sigma * std::sqrt(static_cast<double>(d - 1));
      const auto best = boost::math::tools::brent_find_minima(
          [&](double r) { return -std::log(posteriors::gaussian_radius_pdf(r, d, sigma)); }, 1e-6 * sigma,
          2.0 * sigma * std::sqrt(static_cast<double>(d)) + sigma, 52);
      worst_mode = std::max(worst_mode, std::abs(best.first - analytic) / analytic);
    }
  RngStream rng(108, 0);
  const auto g = norms(false, 4096, 2000, 1.0, rng);
  const double rel_iqr = (stats::quantile(g, 0.75) - stats::quantile(g, 0.25)) / stats::median(g);
  double min_p = 1.0;
  std::string ps;
  for (std::size_t d : {4, 64, 4096}) {
    const auto r = norms(true, d, 2000, 1.0, rng);
    const auto ks = stats::ks_one_sample(r, [](double x) { return std::erf(x / std::sqrt(2.0)); });
    min_p = std::min(min_p, ks.p_value);
    ps += " D=" + std::to_string(d) + ":p=" + fmt(ks.p_value, 3);
  }
  const double secs = seconds_since(t0);
  return {worst_mode <= kModeRelTol && rel_iqr < kRelIqrMax && min_p > kAlpha01 && secs < kC8Seconds,
          "radius-pdf mode vs sigma*sqrt(D-1): max rel. error " + fmt(worst_mode, 3) +
              " (Brent, tol 1e-6); Gaussian D=4096 norm rel. IQR " + fmt(rel_iqr, 3) +
              " (< 0.02); radial norms vs half-normal KS:" + ps + " (> 0.01); " + fmt(secs, 3) + " s"};
}

// ---- 9 -----------------------------------------------------------------------
Outcome c9() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string parts;
  RngStream rng(109, 0);
  for (std::size_t d : {2, 5, 20}) {
    Tensor mu({1, d}), rho({1, d});
    for (auto& v : mu.data()) v = rng.normal();
    for (auto& v : rho.data()) v = evalbench::numcore::inverse_softplus(0.2 + 2.0 * rng.uniform());
    const posteriors::MeanFieldLayer q(mu, rho);
    const std::size_t n = 100000;
    std::vector<double> neg_log(n);
    for (std::size_t i = 0; i < n; ++i) neg_log[i] = -posteriors::radial_log_density(q, posteriors::sample_radial(q, rng).values);
    const auto s = stats::summarize(neg_log);
    const double h = posteriors::entropy_radial(q);
    const double z = std::abs(s.mean - h) / s.se;
    ok = ok && z < kSeBand9;
    parts += " D=" + std::to_string(d) + ": analytic " + fmt(h, 6) + " MC " + fmt(s.mean, 6) + " (" + fmt(z, 3) + " s.e.)";
  }
  const double secs = seconds_since(t0);
  return {ok && secs < kC9Seconds, "radial entropy," + parts + " (< 3 s.e.); " + fmt(secs, 3) + " s"};
}

// ---- 10 ----------------------------------------------------------------------
Outcome c10() {
  cli::DatasetSpec spec;
  spec.name = "prototype_blobs";
  const auto d = cli::make_dataset(spec, 0);
  std::vector<std::size_t> idx(64);
  std::iota(idx.begin(), idx.end(), 0);
  const Dataset batch = d.train.subset(idx);
  RngStream init(110, 0);
  const auto base = bnn::BayesianMlp::create({16, 96, 96, 10}, bnn::PosteriorKind::gaussian(),
                                             evalbench::numcore::Activation::relu(), bnn::Head::classifier(), init);
  std::size_t params = 0;
  for (const auto& l : base.layers) params += l.size();
  auto probe = [&](bool radial, double sigma, std::uint64_t stream) {
    auto m = base;
    m.posterior = radial ? bnn::PosteriorKind::radial() : bnn::PosteriorKind::gaussian();
    for (auto& l : m.layers) l.rho = Tensor(l.rho.shape(), evalbench::numcore::inverse_softplus(sigma));
    RngStream rng(111, stream);
    return bnn::grad_variance_probe(m, batch, bnn::Prior::isotropic(m), 30, rng);
  };
  const auto g = probe(false, 0.5, 0), r = probe(true, 0.5, 1);
  const auto w = stats::welch_greater(g.nll.sq_dev, r.nll.sq_dev);
  std::string curve;
  for (double s : {0.1, 0.2, 0.3, 0.5, 1.0}) {
    const auto gs = probe(false, s, 10), rs = probe(true, s, 11);
    curve += " s=" + fmt(s, 2) + ":" + fmt(gs.nll.std, 3) + "/" + fmt(rs.nll.std, 3);
  }
  return {w.p_value < kAlpha05 && g.kl.std == 0.0,
          std::to_string(params) + " weights, sigma 0.5, 30 probes: NLL-grad std Gaussian " + fmt(g.nll.std) +
              " vs radial " + fmt(r.nll.std) + " (Welch p=" + fmt(w.p_value, 3) + ", need < 0.05); Gaussian KL-grad std " +
              fmt(g.kl.std) + " (need exactly 0), radial " + fmt(r.kl.std) + "; curve Gaussian/radial NLL std:" + curve};
}

// ---- 11 ----------------------------------------------------------------------
Outcome c11() {
  const auto t0 = Clock::now();
  RngStream rng(112, 0);
  double worst_z = 0, off = 0, min_pos = 1e300;
  for (std::size_t depth : {2, 3, 4}) {
    const auto stack = geometry::LayerStack::random(std::vector<std::size_t>(depth + 1, 3), rng);
    const auto analytic = geometry::analytic_cov_recursive(stack);
    const auto mc = geometry::mc_cov(stack, 1000000, rng);
    for (std::size_t i = 0; i < analytic.values().size(); ++i) {
      const double diff = std::abs(analytic.values()[i] - mc.cov.values()[i]);
      const double se = mc.std_error.values()[i];
      worst_z = std::max(worst_z, se > 0 ? diff / se : (diff == 0 ? 0.0 : 1e300));
    }
    if (depth == 2) {
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
          for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t e = 0; e < 3; ++e)
              if (a != c && b != e) off = std::max(off, std::abs(analytic(a, b, c, e)));
    } else {
      auto positive = stack;
      for (auto& l : positive.layers)
        for (auto& v : l.mean.data()) v = 0.1 + rng.uniform();
      const auto t = geometry::analytic_cov_recursive(positive);
      min_pos = std::min(min_pos, *std::min_element(t.values().begin(), t.values().end()));
    }
  }
  Tensor a({3, 4}), b({4, 5}), c({5, 2});
  for (auto* m : {&a, &b, &c})
    for (auto& v : m->data()) v = rng.normal();
  const double resid = geometry::mvg_check(a, b, c).residual;
  const double secs = seconds_since(t0);
  return {worst_z < kSeBand11 && off == 0.0 && min_pos > 0 && resid < kMvgResidual && secs < kC11Seconds,
          "L=2,3,4 at 1e6 samples: max |analytic-MC|/se " + fmt(worst_z, 3) + " (< 4); L=2 off-row-col max " +
              fmt(off) + " (need 0); positive-means min cov " + fmt(min_pos) + " (> 0); MVG residual " + fmt(resid, 3) +
              " (< 1e-10); " + fmt(secs, 3) + " s"};
}

// ---- 12 ----------------------------------------------------------------------
const char* kActiveTestConfig = R"(
experiment = "active-test"
seeds = [0]
[dataset]
name = "prototype_blobs"
classes = 10
n_per_class = 30
test_per_class = 20
dim = 16
active = 8
separation = 8
[model]
hidden = [32]
epochs = 100
batch_size = 16
learning_rate = 3e-3
acquisition_samples = 50
[active]
proposals = ["bald", "shuffled"]
m_max = 0
floor = 0.1
trajectories = 200
)";

Outcome c12() {
  const auto cfg = config(kActiveTestConfig);
  const auto bald = cli::active_test_curve(cfg, 0, "bald");
  const auto ctrl = cli::active_test_curve(cfg, 0, "shuffled");
  const std::size_t n = bald.mse.size();
  std::size_t rises = 0;
  for (std::size_t m = 1; m < n; ++m) rises += bald.median_sq_error[m] > bald.median_sq_error[m - 1];
  const double frac = static_cast<double>(rises) / static_cast<double>(n - 1);
  // reported only: rises of the mean curve, and of the median on a grid of N/20 steps
  std::size_t mean_rises = 0, grid_rises = 0, grid_steps = 0;
  for (std::size_t m = 1; m < n; ++m) mean_rises += bald.mse[m] > bald.mse[m - 1];
  const std::size_t stride = std::max<std::size_t>(1, n / 20);
  for (std::size_t m = 2 * stride - 1; m < n; m += stride, ++grid_steps)
    grid_rises += bald.median_sq_error[m] > bald.median_sq_error[m - stride];
  const std::size_t tenth = n / 10;
  const auto w = stats::welch_greater(ctrl.sq_error[tenth - 1], bald.sq_error[tenth - 1]);
  const bool ok = frac <= kMonotoneSlack && bald.mse.back() == 0.0 && w.p_value < kAlpha05;
  return {ok, "N=" + std::to_string(n) + ", 200 trials: median squared error rises at " + std::to_string(rises) + "/" +
                  std::to_string(n - 1) + " steps (" + fmt(frac, 3) + ", allow 0.05; mean curve rises " +
                  std::to_string(mean_rises) + ", median on a stride-" + std::to_string(stride) + " grid rises " +
                  std::to_string(grid_rises) + "/" + std::to_string(grid_steps) + "); MSE at m=N " +
                  fmt(bald.mse.back()) + " (need 0); at m=" + std::to_string(tenth) + " MSE BALD " +
                  fmt(bald.mse[tenth - 1]) + " vs shuffled-score control " + fmt(ctrl.mse[tenth - 1]) +
                  " (Welch p=" + fmt(w.p_value, 3) + ", need < 0.05)"};
}

// ---- 13 ----------------------------------------------------------------------
double elbo_grad_error(const bnn::BayesianMlp& model, const Dataset& ds, const bnn::Prior& prior, const bnn::Noise& noise,
                       const bnn::ElboOptions& opts) {
  evalbench::numcore::ScalarFn f = [&](std::span<const double> p) {
    bnn::BayesianMlp m = model;
    bnn::unflatten_params(m, p);
    return bnn::elbo(m, ds, prior, noise, opts).loss;
  };
  evalbench::numcore::GradientFn g = [&](std::span<const double> p) {
    bnn::BayesianMlp m = model;
    bnn::unflatten_params(m, p);
    evalbench::numcore::Tape tape;
    auto graph = bnn::build_elbo(tape, m, ds, prior, noise, opts);
    tape.backward(graph.loss);
    std::vector<double> out;
    for (std::size_t l = 0; l < graph.mu.size(); ++l) {
      out.insert(out.end(), graph.mu[l].grad().data().begin(), graph.mu[l].grad().data().end());
      out.insert(out.end(), graph.rho[l].grad().data().begin(), graph.rho[l].grad().data().end());
    }
    return out;
  };
  const auto p = bnn::flatten_params(model);
  return evalbench::numcore::grad_check(f, g, p, 1e-5);
}

double worst_gradient_error() {
  double worst = 0;
  struct Case {
    bnn::PosteriorKind kind;
    bnn::PriorKind prior;
    bool regression;
  };
  for (std::uint64_t trial = 0; trial < 4; ++trial) {
    RngStream rng(113, trial);
    Dataset cls, reg;
    cls.num_classes = 3;
    cls.x = Tensor({10, 3});
    reg.x = Tensor({10, 2});
    for (auto& v : cls.x.data()) v = rng.normal();
    for (auto& v : reg.x.data()) v = rng.normal();
    for (std::size_t i = 0; i < 10; ++i) {
      cls.labels.push_back(rng.uniform_index(3));
      reg.targets.push_back(std::sin(reg.x.at(i, 0)) + 0.3 * reg.x.at(i, 1));
    }
    for (Case c : {Case{bnn::PosteriorKind::gaussian(), bnn::PriorKind::gaussian, false},
                   Case{bnn::PosteriorKind::gaussian(), bnn::PriorKind::gaussian, true},
                   Case{bnn::PosteriorKind::radial(), bnn::PriorKind::gaussian, false},
                   Case{bnn::PosteriorKind::radial(), bnn::PriorKind::radial, false},
                   Case{bnn::PosteriorKind::truncated(1.5), bnn::PriorKind::gaussian, true},
                   Case{bnn::PosteriorKind::mc_dropout(0.3), bnn::PriorKind::gaussian, false}}) {
      const Dataset& ds = c.regression ? reg : cls;
      auto m = bnn::BayesianMlp::create({ds.dim(), 5, c.regression ? std::size_t{1} : std::size_t{3}}, c.kind,
                                        evalbench::numcore::Activation::leaky(),
                                        c.regression ? bnn::Head::regressor(0.5) : bnn::Head::classifier(), rng, -1.5);
      const auto prior = bnn::Prior::isotropic(m, 0.8, c.prior);
      const auto noise = bnn::draw_noise(m, 2, rng);
      std::vector<double> w(ds.size());
      for (auto& v : w) v = 0.5 + rng.uniform();
      bnn::ElboOptions opts;
      opts.weights = w;
      opts.n_total = 30;
      opts.kl_scale = 0.6;
      worst = std::max(worst, elbo_grad_error(m, ds, prior, noise, opts));
    }
  }
  return worst;
}

const std::vector<std::string> kTinyConfigs = {
    R"(experiment = "continual"
seeds = [0, 1]
[dataset]
name = "prototype_blobs"
n_per_class = 20
test_per_class = 10
dim = 8
active = 4
classes = 6
[model]
hidden = [8]
epochs = 2
batch_size = 16
test_samples = 2
[continual]
tasks = 3
methods = ["vcl", "vcl_coreset", "coreset_only", "ewc"]
protocols = ["single_head", "multi_head"]
coreset_size = 4
finetune_epochs = 1
probes = 1
)",
    R"(experiment = "active-learn"
seeds = [0, 1]
[dataset]
name = "toy_regression"
[model]
learner = "linear"
[active]
proposals = ["distance_boltzmann", "epsilon_greedy", "uniform"]
start_points = 4
m_max = 6
checkpoint_every = 3
)",
    R"(experiment = "active-learn"
seeds = [3]
[dataset]
name = "prototype_blobs"
n_per_class = 10
test_per_class = 5
dim = 8
active = 4
classes = 4
[model]
hidden = [8]
epochs = 2
acquisition_samples = 4
test_samples = 2
[active]
proposals = ["boltzmann"]
start_points = 4
m_max = 4
retrain_every = 2
checkpoint_every = 2
)",
    R"(experiment = "active-test"
seeds = [0, 1]
[dataset]
name = "prototype_blobs"
n_per_class = 10
test_per_class = 5
dim = 8
active = 4
classes = 4
[model]
hidden = [8]
epochs = 2
acquisition_samples = 4
[active]
proposals = ["bald", "shuffled", "uniform"]
m_max = 8
trajectories = 20
)",
    R"(experiment = "bias-probe"
seeds = [0, 1]
[dataset]
name = "toy_regression"
[model]
learner = "linear"
[active]
proposals = ["distance_boltzmann", "uniform"]
m_max = 5
trajectories = 20
)",
    R"(experiment = "ofb-probe"
seeds = [0, 1]
[dataset]
name = "prototype_blobs"
n_per_class = 10
test_per_class = 5
dim = 8
active = 4
classes = 4
[model]
hidden = [8]
epochs = 2
acquisition_samples = 4
[active]
start_points = 4
m_max = 4
retrain_every = 2
trajectories = 20
)",
    R"(experiment = "geometry-probe"
seeds = [0, 1]
[geometry]
depths = [2, 3]
samples = 5000
)",
    R"(experiment = "soapbubble-probe"
seeds = [0]
[dataset]
name = "prototype_blobs"
n_per_class = 10
test_per_class = 5
dim = 8
active = 4
classes = 4
[soapbubble]
dims = [4, 16]
samples = 200
grad_widths = [8, 6, 4]
grad_sigmas = [0.5]
probes = 3
)"};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome c13() {
  const double grad = worst_gradient_error();
  const auto root = std::filesystem::temp_directory_path() / ("evalbench_acceptance_" + std::to_string(::getpid()));
  std::size_t identical = 0, total = 0, rows = 0;
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < kTinyConfigs.size(); ++i) {
    const auto cfg = config(kTinyConfigs[i]);
    std::string first;
    bool same = true;
    for (std::size_t run = 0; run < 3; ++run) {
      const auto dir = root / (std::to_string(i) + "_" + std::to_string(run));
      const auto o = cli::run(cfg, {dir, run == 2 ? std::size_t{2} : std::size_t{1}, true, "inline"});
      const std::string csv = slurp(o.csv);
      if (o.exit_code != 0 || o.rows == 0) same = false;
      if (run == 0) {
        first = csv;
        rows += o.rows;
      } else {
        same = same && csv == first;
      }
    }
    ++total;
    if (same)
      ++identical;
    else
      bad.push_back(cli::to_string(cfg.kind));
  }
  std::filesystem::remove_all(root);
  std::string which;
  for (const auto& b : bad) which += " " + b;
  return {grad < kGradTol && identical == total,
          "worst ELBO gradient-check error " + fmt(grad, 3) + " over 24 (posterior, prior, head) cases (< 1e-5); " +
              std::to_string(identical) + "/" + std::to_string(total) +
              " configs gave byte-identical CSVs over 3 runs (jobs 1, 1, 2; " + std::to_string(rows) + " rows)" +
              (bad.empty() ? "" : "; differing:" + which)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> criteria = {
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7},
      {8, c8}, {9, c9}, {10, c10}, {11, c11}, {12, c12}, {13, c13}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& [k, _] : criteria) selected.insert(k);

  const char* strict_env = std::getenv("EVALBENCH_ACCEPTANCE_STRICT");
  const bool strict = strict_env && std::string(strict_env) == "1";
  int failed = 0, crashed = 0;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::cerr << "no criterion " << k << "\n";
      return 2;
    }
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
      ++crashed;
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << o.detail << " [" << fmt(seconds_since(t0), 3)
              << " s]" << std::endl;
  }
  std::cout << selected.size() - static_cast<std::size_t>(failed) << "/" << selected.size() << " criteria passed"
            << std::endl;
  if (crashed) return 2;
  return strict && failed ? 1 : 0;
}
