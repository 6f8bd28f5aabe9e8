#include "evalbench/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "evalbench/numcore/error.hpp"

namespace evalbench::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw InvalidArgument("variance needs at least two values");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  s.mean = mean(xs);
  if (s.n > 1) {
    s.std = std::sqrt(variance(xs));
    s.se = s.std / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw InvalidArgument("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.3) {
    // Alternative series converges fast for small x.
    const double c = std::sqrt(2.0 * M_PI) / x;
    double s = 0.0;
    for (int k = 1; k < 50; ++k) {
      const double t = (2.0 * k - 1.0) * M_PI / x;
      s += std::exp(-t * t / 8.0);
    }
    return std::clamp(1.0 - c * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw InvalidArgument("ks test on empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks test on empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)};
}

TestResult sign_test(std::size_t successes, std::size_t n) {
  if (successes > n) throw InvalidArgument("sign test: successes exceed trials");
  if (successes == 0) return {0.0, 1.0};
  boost::math::binomial_distribution<double> binom(static_cast<double>(n), 0.5);
  const double p = boost::math::cdf(boost::math::complement(binom, static_cast<double>(successes) - 1.0));
  return {static_cast<double>(successes), p};
}

TestResult welch_greater(std::span<const double> a, std::span<const double> b) {
  const double va = variance(a) / static_cast<double>(a.size());
  const double vb = variance(b) / static_cast<double>(b.size());
  const double se = std::sqrt(va + vb);
  const double t = (mean(a) - mean(b)) / se;
  const double df = (va + vb) * (va + vb) /
                    (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  if (!std::isfinite(t)) return {t, t > 0 ? 0.0 : 1.0};
  boost::math::students_t dist(df);
  return {t, boost::math::cdf(boost::math::complement(dist, t))};
}

TestResult t_less_than_zero(std::span<const double> d) {
  const double se = std::sqrt(variance(d) / static_cast<double>(d.size()));
  const double t = mean(d) / se;
  if (!std::isfinite(t)) return {t, t < 0 ? 0.0 : 1.0};
  boost::math::students_t dist(static_cast<double>(d.size() - 1));
  return {t, boost::math::cdf(dist, t)};
}

}  // namespace evalbench::stats
