#include "evalbench/continual/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evalbench/numcore/error.hpp"

namespace evalbench::continual {

namespace {

double sq_dist(const Tensor& x, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.cols(); ++k) {
    const double d = x.at(a, k) - x.at(b, k);
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<std::size_t> kcenter_coreset(const Tensor& x, std::size_t k, std::size_t first) {
  const std::size_t n = x.rows();
  if (k > n) throw InvalidArgument("coreset larger than the dataset");
  if (k == 0) return {};
  if (first >= n) throw InvalidArgument("first centre out of range");
  std::vector<std::size_t> out{first};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  taken[first] = true;
  while (out.size() < k) {
    const std::size_t last = out.back();
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(x, i, last));
      if (!taken[i] && nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    taken[best] = true;
    out.push_back(best);
  }
  return out;
}

std::vector<std::size_t> kcenter_coreset(const Tensor& x, std::size_t k, RngStream& rng) {
  if (x.rows() == 0) throw InvalidArgument("coreset of an empty dataset");
  return kcenter_coreset(x, k, rng.uniform_index(x.rows()));
}

double covering_radius(const Tensor& x, std::span<const std::size_t> centres) {
  if (centres.empty()) throw InvalidArgument("covering radius needs a centre");
  double worst = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t c : centres) d = std::min(d, sq_dist(x, i, c));
    worst = std::max(worst, d);
  }
  return std::sqrt(worst);
}

std::pair<Dataset, Dataset> split_coreset(const Dataset& ds, std::size_t k, RngStream& rng) {
  std::vector<std::size_t> core = kcenter_coreset(ds.x, k, rng);
  std::vector<bool> in(ds.size(), false);
  for (std::size_t i : core) in[i] = true;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!in[i]) rest.push_back(i);
  return {ds.subset(core), ds.subset(rest)};
}

}  // namespace evalbench::continual
