#include <cmath>
#include <numbers>

#include "doctest.h"
#include "evalbench/numcore/error.hpp"
#include "evalbench/posteriors/divergences.hpp"
#include "evalbench/posteriors/hyperspherical.hpp"
#include "evalbench/posteriors/samplers.hpp"
#include "evalbench/stats/stats.hpp"

using namespace evalbench::posteriors;
using evalbench::InvalidArgument;
using evalbench::numcore::Tensor;

namespace {

constexpr double kPi = std::numbers::pi;

MeanFieldLayer flat(std::vector<double> mu, std::vector<double> sigma) {
  const std::size_t n = mu.size();
  Tensor rho({1, n});
  for (std::size_t i = 0; i < n; ++i) rho[i] = evalbench::numcore::inverse_softplus(sigma[i]);
  return MeanFieldLayer(Tensor({1, n}, std::move(mu)), std::move(rho));
}

MeanFieldLayer unit(std::size_t n, double sigma = 1.0) {
  return flat(std::vector<double>(n, 0.0), std::vector<double>(n, sigma));
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double norm_of(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("gaussian sampler") {
  RngStream rng(1, 0);
  MeanFieldLayer tight(Tensor({1, 3}, std::vector<double>{0.5, -1.0, 2.0}), Tensor({1, 3}, -40.0));
  auto s = sample_gaussian(tight, rng);
  CHECK(evalbench::numcore::max_abs_diff(s.values, tight.mu) < 1e-15);

  MeanFieldLayer l = flat({0, 0}, {2, 3});
  Tensor w = apply_gaussian(l, Tensor({1, 2}, std::vector<double>{1, -1}));
  CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(-3.0).epsilon(1e-12));

  auto big = sample_gaussian(unit(100000), rng);
  const double ratio = norm_of(big.values) / std::sqrt(1e5);
  CHECK(ratio > 0.99);
  CHECK(ratio < 1.01);
}

TEST_CASE("radial sampler") {
  MeanFieldLayer l = unit(2);
  Tensor w = apply_radial(l, Tensor({1, 2}, std::vector<double>{3, 4}), 1.0);
  CHECK(w[0] == doctest::Approx(0.6));
  CHECK(w[1] == doctest::Approx(0.8));

  RngStream rng(2, 0);
  MeanFieldLayer shifted = flat({1, -2, 0.5, 3}, {0.1, 2, 0.7, 1.3});
  const Tensor sig = shifted.sigma();
  for (int i = 0; i < 200; ++i) {
    auto s = sample_radial(shifted, rng);
    double n = 0.0;
    for (std::size_t k = 0; k < 4; ++k) n += std::pow((s.values[k] - shifted.mu[k]) / sig[k], 2);
    CHECK(std::sqrt(n) == doctest::Approx(s.noise.radius).epsilon(1e-12));
  }
}

TEST_CASE("radial radius mean at D = 1e5") {
  RngStream rng(3, 0);
  MeanFieldLayer l = unit(100000);
  double acc = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) acc += norm_of(sample_radial(l, rng).values);
  CHECK(acc / n == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(0.01));
}

TEST_CASE("truncated sampler") {
  RngStream rng(4, 0);
  auto s = sample_truncated(unit(1000), rng, 0.1);
  for (double v : s.values.data()) CHECK(std::abs(v) <= 0.1);
  CHECK(s.noise.rejections > 0);

  auto v1 = sample_truncated(unit(100000), rng, 1.0);
  const double var = evalbench::stats::variance(v1.noise.eps.data());
  CHECK(std::abs(var - 0.291125094772793) < 0.01);
  CHECK(truncated_variance_factor(1.0) == doctest::Approx(0.291125094772793).epsilon(1e-12));

  std::vector<double> a, b;
  for (int i = 0; i < 10000; ++i) {
    a.push_back(sample_truncated(unit(1), rng, 8.0).values[0]);
    b.push_back(sample_gaussian(unit(1), rng).values[0]);
  }
  CHECK(evalbench::stats::ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("samplers are deterministic per stream") {
  MeanFieldLayer l = flat({0.1, 0.2, 0.3}, {0.5, 0.6, 0.7});
  for (auto kind : {PosteriorKind::gaussian(), PosteriorKind::radial(), PosteriorKind::truncated(1.5)}) {
    RngStream a(9, 1), b(9, 1);
    CHECK(sample(l, kind, a).values == sample(l, kind, b).values);
  }
}

TEST_CASE("mc dropout masks") {
  Tensor w({4, 3}, 1.0);
  RngStream a(5, 5), b(5, 5);
  auto s1 = sample_mc_dropout(w, a, 0.5, 10);
  auto s2 = sample_mc_dropout(w, b, 0.5, 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(s1[i].values == s2[i].values);

  RngStream c(6, 6);
  for (const auto& s : sample_mc_dropout(w, c, 1e-9, 5)) {
    for (double v : s.values.data()) CHECK(v == doctest::Approx(1.0));
  }

  RngStream d(7, 7);
  double acc = 0.0;
  auto many = sample_mc_dropout(Tensor({1, 1}, 1.0), d, 0.5, 1000);
  for (const auto& s : many) acc += s.values[0];
  CHECK(std::abs(acc / 1000.0 - 1.0) < 0.05);
  CHECK_THROWS_AS(dropout_masks(3, d, 1.0, 2), InvalidArgument);
}

TEST_CASE("entropies") {
  CHECK(entropy_gaussian(unit(1)) == doctest::Approx(1.4189385332046727));
  CHECK(entropy_gaussian(unit(4, 2.0)) - entropy_gaussian(unit(4)) == doctest::Approx(4 * std::log(2.0)));
  CHECK(entropy_gaussian(flat({0, 0, 0}, {1, 2, 4})) ==
        doctest::Approx(1.5 * std::log(2 * kPi * std::numbers::e) + std::log(8.0)));
  CHECK(entropy_radial(unit(7)) == doctest::Approx(1.4189385332046727));
  CHECK(entropy_radial(unit(7, 2.0)) - entropy_radial(unit(7)) == doctest::Approx(7 * std::log(2.0)));
  // Large c recovers the Gaussian entropy.
  CHECK(entropy_truncated(unit(3), 30.0) == doctest::Approx(entropy_gaussian(unit(3))));
}

TEST_CASE("radial entropy matches MC through the hyperspherical density") {
  RngStream rng(8, 0);
  MeanFieldLayer l = flat({0.3, -1, 2, 0, 0.5}, {0.5, 1.5, 0.8, 2.0, 1.1});
  const int n = 100000;
  std::vector<double> lp(n);
  for (int i = 0; i < n; ++i) lp[i] = -radial_log_density(l, sample_radial(l, rng).values);
  auto s = evalbench::stats::summarize(lp);
  CHECK(std::abs(s.mean - entropy_radial(l)) < 3 * s.se);
}

TEST_CASE("hyperspherical coordinates") {
  std::vector<double> e1{1, 0}, e2{0, 1};
  auto h1 = cart_to_hyperspherical(e1);
  CHECK(h1.radius == 1.0);
  CHECK(h1.angles[0] == 0.0);
  auto h2 = cart_to_hyperspherical(e2);
  CHECK(h2.angles[0] == doctest::Approx(kPi / 2));
  std::vector<double> zero{0, 0, 0};
  CHECK_THROWS_AS(cart_to_hyperspherical(zero), InvalidArgument);

  RngStream rng(10, 0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(6);
    for (auto& x : v) x = rng.normal();
    auto back = hyperspherical_to_cart(cart_to_hyperspherical(v));
    for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(back[i] - v[i]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("log jacobian equals the telescoped tail norms") {
  // |dv/d(r, angles)| = prod_{k=1}^{D-1} |v_{k..D}| for the standard transform.
  RngStream rng(11, 0);
  std::vector<double> v(7);
  for (auto& x : v) x = rng.normal();
  double oracle = 0.0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    double t = 0.0;
    for (std::size_t j = k; j < v.size(); ++j) t += v[j] * v[j];
    oracle += 0.5 * std::log(t);
  }
  CHECK(log_jacobian(cart_to_hyperspherical(v)) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("radial log densities") {
  Hyperspherical d1{0.0, {}};
  CHECK(radial_logpdf_normalized(d1) == doctest::Approx(0.5 * std::log(2 / kPi)));
  CHECK(radial_logpdf_normalized(d1) == doctest::Approx(-0.2258).epsilon(1e-3));

  // D = 2 over (r, theta).
  auto inner = [](double r) {
    return simpson([r](double th) { return std::exp(radial_logpdf_normalized({r, {th}})); }, -kPi + 1e-15, kPi, 64);
  };
  CHECK(std::abs(simpson(inner, 0.0, 12.0, 2000) - 1.0) < 1e-6);

  // Equatorial angles leave only the radius factor.
  Hyperspherical eq{1.3, {0.2, kPi / 2, kPi / 2, kPi / 2}};
  CHECK(radial_logpdf_hyperspherical(eq) ==
        doctest::Approx(4 * std::log(1.3) - 0.5 * std::log(2 * kPi) - 0.5 * 1.3 * 1.3));
  Hyperspherical bad{1.0, {0.0, 4.0}};
  CHECK_THROWS_AS(radial_logpdf_hyperspherical(bad), InvalidArgument);
}

TEST_CASE("radial prior cross entropy") {
  RngStream rng(12, 0);
  MeanFieldLayer q = unit(3);
  auto self = radial_prior_cross_entropy(q, q, 100000, rng);
  CHECK(std::abs(self.value + entropy_radial(q)) < 3 * self.std_error);

  // Direct evaluation in the prior's own coordinates with the same noise.
  MeanFieldLayer prior = flat({0.5, -0.5, 0.0}, {2, 2, 2});
  MeanFieldLayer qq = flat({0.1, 0.2, 0.3}, {0.4, 0.5, 0.6});
  RngStream a(13, 0), b(13, 0);
  auto est = radial_prior_cross_entropy(qq, prior, 500, a);
  double direct = 0.0;
  for (int s = 0; s < 500; ++s) {
    auto w = sample_radial(qq, b);
    double r2 = 0.0;
    for (int i = 0; i < 3; ++i) r2 += std::pow((w.values[i] - prior.mu[i]) / 2.0, 2);
    direct += -0.5 * std::log(2 * kPi) - 0.5 * r2 - 3 * std::log(2.0);
  }
  CHECK(est.value == doctest::Approx(direct / 500).epsilon(1e-10));

  RngStream c(14, 0), d(14, 0);
  CHECK(radial_prior_cross_entropy(qq, prior, 1, c).value == radial_prior_cross_entropy(qq, prior, 1, d).value);
}

TEST_CASE("gaussian radius pdf") {
  double best_r = 0.0, best = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double r = i * 1e-3;
    const double p = gaussian_radius_pdf(r, 10, 1.0);
    if (p > best) best = p, best_r = r;
  }
  CHECK(best_r == doctest::Approx(3.0));
  CHECK(std::abs(simpson([](double r) { return gaussian_radius_pdf(r, 7, 1.3); }, 0.0, 30.0, 20000) - 1.0) < 1e-8);
  CHECK(gaussian_radius_pdf(0.7, 1, 1.0) == doctest::Approx(2 * std::exp(-0.245) / std::sqrt(2 * kPi)));
}

TEST_CASE("diagonal gaussian KL") {
  MeanFieldLayer q = flat({0.3, -0.2}, {0.5, 1.5});
  CHECK(kl_diag_gaussians(q, q) == 0.0);
  CHECK(kl_diag_gaussians(unit(5), unit(5)) == 0.0);
  // Unit prior: sum (sigma^2 + mu^2)/2 - sum log sigma - D/2.
  double oracle = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double s = q.sigma()[i], m = q.mu[i];
    oracle += 0.5 * (s * s + m * m) - std::log(s) - 0.5;
  }
  CHECK(kl_diag_gaussians(q, unit(2)) == doctest::Approx(oracle).epsilon(1e-12));
  // Minimised at sigma = 1 with mu = 0.
  double prev = 1e9;
  for (double s : {0.5, 0.8, 0.95, 1.0}) {
    const double v = kl_diag_gaussians(unit(3, s), unit(3));
    CHECK(v < prev);
    prev = v;
  }
  CHECK(kl_diag_gaussians(unit(3, 1.05), unit(3)) > prev);
}

TEST_CASE("full vs diagonal KL") {
  Eigen::MatrixXd diag = Eigen::Vector3d(1, 2, 3).asDiagonal();
  CHECK(kl_full_vs_diag(diag) == doctest::Approx(0.0));
  Eigen::Matrix2d c;
  c << 1, 0.5, 0.5, 1;
  CHECK(kl_full_vs_diag(c) == doctest::Approx(0.14384103622589045));
  Eigen::Matrix2d bad;
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(kl_full_vs_diag(bad), InvalidArgument);
}

TEST_CASE("full vs diagonal KL matches MC at 1e6 samples") {
  RngStream rng(15, 0);
  const int d = 5;
  std::vector<std::vector<double>> a(d, std::vector<double>(d));
  for (auto& row : a)
    for (auto& v : row) v = rng.normal();
  // Sigma = A A^T + I, built and factorised by hand.
  std::vector<std::vector<double>> s(d, std::vector<double>(d, 0.0)), l(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) s[i][j] += a[i][k] * a[j][k];
      if (i == j) s[i][j] += 1.0;
    }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = s[i][j];
      for (int k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
      l[i][j] = i == j ? std::sqrt(v) : v / l[j][j];
    }
  double logdet = 0.0;
  for (int i = 0; i < d; ++i) logdet += 2 * std::log(l[i][i]);
  const int n = 1000000;
  double mean = 0.0, m2 = 0.0;
  std::vector<double> z(d), x(d);
  for (int t = 0; t < n; ++t) {
    for (auto& v : z) v = rng.normal();
    for (int i = 0; i < d; ++i) {
      x[i] = 0.0;
      for (int k = 0; k <= i; ++k) x[i] += l[i][k] * z[k];
    }
    // log N(x; 0, S) - log N(x; 0, diag S)
    double lr = -0.5 * logdet;
    for (int i = 0; i < d; ++i) lr += -0.5 * z[i] * z[i] + 0.5 * std::log(s[i][i]) + 0.5 * x[i] * x[i] / s[i][i];
    const double delta = lr - mean;
    mean += delta / (t + 1);
    m2 += delta * (lr - mean);
  }
  const double se = std::sqrt(m2 / (n - 1) / n);
  Eigen::MatrixXd sig(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) sig(i, j) = s[i][j];
  CHECK(std::abs(kl_full_vs_diag(sig) - mean) < 3 * se);
}
