#pragma once

#include <functional>
#include <span>
#include <vector>

namespace evalbench::stats {

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  double se = 0.0;   // std / sqrt(n)
  std::size_t n = 0;
};

Summary summarize(std::span<const double> xs);
double mean(std::span<const double> xs);
double variance(std::span<const double> xs);
/// Linear-interpolation quantile, q in [0, 1].
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x);

/// One-sided sign test: p = P(Binom(n, 1/2) >= successes).
TestResult sign_test(std::size_t successes, std::size_t n);
/// Welch t-test for mean(a) > mean(b), one-sided.
TestResult welch_greater(std::span<const double> a, std::span<const double> b);
/// One-sample t-test for mean(d) < 0, one-sided.
TestResult t_less_than_zero(std::span<const double> d);

}  // namespace evalbench::stats
