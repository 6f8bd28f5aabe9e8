#include "evalbench/bnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evalbench/numcore/error.hpp"

namespace evalbench::bnn {

double predictive_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double bald_mi(const Tensor& samples) {
  if (samples.rank() != 2 || samples.rows() < 2) throw InvalidArgument("bald_mi needs at least two samples");
  const std::size_t s = samples.rows(), c = samples.cols();
  std::vector<double> mean(c, 0.0);
  double mean_h = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    auto row = samples.row(i);
    for (std::size_t k = 0; k < c; ++k) mean[k] += row[k] / static_cast<double>(s);
    mean_h += predictive_entropy(row) / static_cast<double>(s);
  }
  return std::max(0.0, predictive_entropy(mean) - mean_h);
}

std::vector<double> bald_scores(std::span<const Tensor> prob_samples) {
  if (prob_samples.size() < 2) throw InvalidArgument("bald_scores needs at least two samples");
  const std::size_t n = prob_samples[0].rows(), c = prob_samples[0].cols();
  std::vector<double> out(n);
  Tensor per({prob_samples.size(), c});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < prob_samples.size(); ++s) {
      auto src = prob_samples[s].row(i);
      std::copy(src.begin(), src.end(), per.row(s).begin());
    }
    out[i] = bald_mi(per);
  }
  return out;
}

double ece(const Tensor& mean_probs, std::span<const std::size_t> labels, std::size_t n_bins) {
  if (n_bins == 0) throw InvalidArgument("ece needs at least one bin");
  const std::size_t n = labels.size();
  std::vector<double> conf_sum(n_bins, 0.0), acc_sum(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = mean_probs.row(i);
    const auto pred = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    const double conf = row[pred];
    auto b = static_cast<std::size_t>(conf * static_cast<double>(n_bins));
    b = std::min(b, n_bins - 1);
    conf_sum[b] += conf;
    acc_sum[b] += pred == labels[i] ? 1.0 : 0.0;
    ++count[b];
  }
  double e = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b)
    if (count[b] > 0) e += std::abs(acc_sum[b] - conf_sum[b]) / static_cast<double>(n);
  return e;
}

std::vector<double> referral_curve(std::span<const double> uncertainty, const std::vector<bool>& correct,
                                   std::span<const double> referral_fracs) {
  if (uncertainty.size() != correct.size()) throw DimensionError("referral_curve: length mismatch");
  const std::size_t n = uncertainty.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return uncertainty[a] < uncertainty[b]; });
  std::vector<double> out;
  for (double f : referral_fracs) {
    if (f < 0.0 || f >= 1.0) throw InvalidArgument("referral fraction must lie in [0, 1)");
    const auto keep = static_cast<std::size_t>(std::ceil((1.0 - f) * static_cast<double>(n) - 1e-9));
    std::size_t ok = 0;
    for (std::size_t i = 0; i < keep; ++i) ok += correct[order[i]];
    out.push_back(keep == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(keep));
  }
  return out;
}

}  // namespace evalbench::bnn
