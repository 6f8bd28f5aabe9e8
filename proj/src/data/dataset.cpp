#include "evalbench/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evalbench/numcore/error.hpp"

namespace evalbench::data {

Dataset Dataset::subset(std::span<const std::size_t> idx) const {
  Dataset out;
  out.num_classes = num_classes;
  out.provenance = provenance;
  out.x = idx.empty() ? Tensor({0, dim()}) : numcore::gather_rows(x, idx);
  for (std::size_t i : idx) {
    if (!labels.empty()) out.labels.push_back(labels[i]);
    if (!targets.empty()) out.targets.push_back(targets[i]);
  }
  return out;
}

void Dataset::validate() const {
  if (!x.all_finite()) throw InvalidArgument("dataset '" + provenance + "' has non-finite features");
  if (is_regression()) {
    if (targets.size() != size()) throw InvalidArgument("dataset '" + provenance + "': target count mismatch");
    for (double t : targets)
      if (!std::isfinite(t)) throw InvalidArgument("dataset '" + provenance + "' has non-finite targets");
  } else {
    if (labels.size() != size()) throw InvalidArgument("dataset '" + provenance + "': label count mismatch");
    for (auto l : labels)
      if (l >= num_classes) throw InvalidArgument("dataset '" + provenance + "': label out of range");
  }
}

Dataset concat(std::span<const Dataset> parts) {
  if (parts.empty()) throw InvalidArgument("concat of no datasets");
  Dataset out;
  out.num_classes = parts[0].num_classes;
  out.provenance = parts[0].provenance;
  const std::size_t d = parts[0].dim();
  std::vector<double> flat;
  for (const auto& p : parts) {
    if (p.size() == 0) continue;
    if (p.dim() != d || p.num_classes != out.num_classes) throw DimensionError("concat: incompatible datasets");
    flat.insert(flat.end(), p.x.data().begin(), p.x.data().end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    out.targets.insert(out.targets.end(), p.targets.begin(), p.targets.end());
  }
  const std::size_t n = flat.size() / std::max<std::size_t>(d, 1);
  out.x = Tensor({n, d}, std::move(flat));
  return out;
}

double toy_target(double x) {
  return std::max(0.0, x) * (std::pow(std::abs(x), 1.5) + std::sin(20.0 * x) / 4.0);
}

Dataset toy_regression(const std::vector<std::size_t>& cluster_sizes, RngStream& rng) {
  static constexpr double kBands[3][2] = {{-1.2, -0.8}, {0.0, 0.5}, {1.0, 1.5}};
  if (cluster_sizes.size() != 3) throw InvalidArgument("toy_regression needs three cluster sizes");
  Dataset ds;
  ds.provenance = "toy_regression";
  std::vector<double> xs;
  for (std::size_t b = 0; b < 3; ++b) {
    if (cluster_sizes[b] == 0) throw InvalidArgument("toy_regression cluster sizes must be positive");
    for (std::size_t i = 0; i < cluster_sizes[b]; ++i) {
      xs.push_back(kBands[b][0] + (kBands[b][1] - kBands[b][0]) * rng.uniform());
    }
  }
  for (double x : xs) ds.targets.push_back(toy_target(x));
  const std::size_t n = xs.size();
  ds.x = Tensor({n, 1}, std::move(xs));
  return ds;
}

Dataset two_moons(std::size_t n, double noise_std, RngStream& rng) {
  if (n < 2) throw InvalidArgument("two_moons needs n >= 2");
  const std::size_t n_outer = (n + 1) / 2;
  const std::size_t n_inner = n - n_outer;
  Dataset ds;
  ds.provenance = "two_moons";
  ds.num_classes = 2;
  std::vector<double> f;
  auto arc = [&](std::size_t count, bool inner) {
    for (std::size_t i = 0; i < count; ++i) {
      const double t = count > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
      double a = inner ? 1.0 - std::cos(t) : std::cos(t);
      double b = inner ? 0.5 - std::sin(t) : std::sin(t);
      f.push_back(a + noise_std * rng.normal());
      f.push_back(b + noise_std * rng.normal());
      ds.labels.push_back(inner ? 1 : 0);
    }
  };
  arc(n_outer, false);
  arc(n_inner, true);
  ds.x = Tensor({n, 2}, std::move(f));
  auto perm = numcore::permutation(rng, n);
  return ds.subset(perm);
}

Dataset blobs(std::size_t n_per_class, std::size_t classes, std::size_t d, double separation, RngStream& rng) {
  if (classes < 2 || d < 1) throw InvalidArgument("blobs needs C >= 2 and d >= 1");
  Dataset ds;
  ds.provenance = "blobs";
  ds.num_classes = classes;
  std::vector<double> f;
  f.reserve(n_per_class * classes * d);
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<double> centre(d, 0.0);
    centre[c % d] += separation;
    if (c >= d) centre[(c / d + c) % d] += separation;
    for (std::size_t i = 0; i < n_per_class; ++i) {
      for (std::size_t k = 0; k < d; ++k) f.push_back(centre[k] + rng.normal());
      ds.labels.push_back(c);
    }
  }
  ds.x = Tensor({n_per_class * classes, d}, std::move(f));
  auto perm = numcore::permutation(rng, ds.size());
  return ds.subset(perm);
}

Dataset prototype_blobs(std::size_t n_per_class, std::size_t classes, std::size_t d, std::size_t active,
                        double separation, std::uint64_t prototype_seed, RngStream& rng) {
  if (classes < 2 || d < 1) throw InvalidArgument("prototype_blobs needs C >= 2 and d >= 1");
  if (active == 0 || active > d) throw InvalidArgument("active features must lie in [1, d]");
  RngStream proto(prototype_seed, 0x70726f74);
  std::vector<double> centres(classes * active);
  const double scale = separation / std::sqrt(static_cast<double>(active));
  for (auto& c : centres) c = scale * std::abs(proto.normal());
  Dataset ds;
  ds.provenance = "prototype_blobs";
  ds.num_classes = classes;
  std::vector<double> f(n_per_class * classes * d, 0.0);
  std::size_t row = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < n_per_class; ++i, ++row) {
      for (std::size_t k = 0; k < active; ++k) f[row * d + k] = std::max(0.0, centres[c * active + k] + rng.normal());
      ds.labels.push_back(c);
    }
  }
  ds.x = Tensor({n_per_class * classes, d}, std::move(f));
  auto perm = numcore::permutation(rng, ds.size());
  return ds.subset(perm);
}

Dataset unbalance_and_noise(const Dataset& ds, const std::vector<double>& ratios, double label_noise_frac,
                            RngStream& rng) {
  if (ds.is_regression()) throw InvalidArgument("unbalance_and_noise needs a classification dataset");
  if (ratios.size() != ds.num_classes) throw InvalidArgument("unbalance_and_noise: one ratio per class required");
  if (label_noise_frac < 0.0 || label_noise_frac > 1.0) throw InvalidArgument("label noise fraction must be in [0, 1]");
  for (double r : ratios)
    if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("unbalance ratios must lie in (0, 1]");

  Dataset noisy = ds;
  const auto n_noisy = static_cast<std::size_t>(std::llround(label_noise_frac * static_cast<double>(ds.size())));
  auto order = numcore::permutation(rng, ds.size());
  for (std::size_t i = 0; i < n_noisy; ++i) noisy.labels[order[i]] = rng.uniform_index(ds.num_classes);

  std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
  for (std::size_t i = 0; i < noisy.size(); ++i) by_class[noisy.labels[i]].push_back(i);
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < ds.num_classes; ++c) {
    auto& members = by_class[c];
    const auto k = static_cast<std::size_t>(std::llround(ratios[c] * static_cast<double>(members.size())));
    if (k == 0 && !members.empty()) {
      throw InvalidArgument("unbalance ratio for class " + std::to_string(c) + " leaves no examples");
    }
    auto p = numcore::permutation(rng, members.size());
    for (std::size_t i = 0; i < k; ++i) keep.push_back(members[p[i]]);
  }
  std::sort(keep.begin(), keep.end());
  Dataset out = noisy.subset(keep);
  out.provenance = ds.provenance + "+unbalanced";
  return out;
}

std::pair<Dataset, Dataset> split_train_val(const Dataset& ds, std::size_t n_val, RngStream& rng) {
  if (n_val >= ds.size() && ds.size() > 0) throw InvalidArgument("split_train_val: n_val must be < n");
  auto perm = numcore::permutation(rng, ds.size());
  std::vector<std::size_t> val(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(perm.begin() + static_cast<std::ptrdiff_t>(n_val), perm.end());
  return {ds.subset(train), ds.subset(val)};
}

Dataset standardize(const Dataset& ds) {
  Dataset out = ds;
  const std::size_t n = ds.size(), d = ds.dim();
  if (n == 0) return out;
  for (std::size_t k = 0; k < d; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += ds.x.at(i, k);
    m /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (ds.x.at(i, k) - m) * (ds.x.at(i, k) - m);
    const double sd = std::sqrt(v / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) out.x.at(i, k) = sd > 0.0 ? (ds.x.at(i, k) - m) / sd : ds.x.at(i, k) - m;
  }
  return out;
}

}  // namespace evalbench::data
