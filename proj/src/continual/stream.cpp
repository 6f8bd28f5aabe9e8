#include "evalbench/continual/stream.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "evalbench/numcore/error.hpp"

namespace evalbench::continual {

namespace {

std::vector<std::size_t> rows_of(const Dataset& ds, std::span<const std::size_t> classes) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (std::find(classes.begin(), classes.end(), ds.labels[i]) != classes.end()) idx.push_back(i);
  return idx;
}

void check_compatible(const Dataset& train, const Dataset& test) {
  if (train.is_regression() || test.is_regression()) throw InvalidArgument("task streams need classification data");
  if (train.num_classes != test.num_classes || train.dim() != test.dim())
    throw InvalidArgument("train and test splits disagree on shape");
}

}  // namespace

Dataset permute_features(const Dataset& ds, std::span<const std::size_t> perm) {
  if (perm.size() != ds.dim()) throw DimensionError("permutation length must equal the feature dimension");
  Dataset out = ds;
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = 0; j < perm.size(); ++j) out.x.at(i, j) = ds.x.at(i, perm[j]);
  return out;
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    if (perm[j] >= perm.size()) throw InvalidArgument("not a permutation");
    inv[perm[j]] = j;
  }
  return inv;
}

TaskStream make_permuted_stream(const Dataset& train, const Dataset& test, std::size_t tasks, RngStream& rng) {
  if (tasks == 0) throw InvalidArgument("a stream needs at least one task");
  check_compatible(train, test);
  TaskStream s;
  s.kind = StreamKind::permuted;
  s.num_classes = train.num_classes;
  std::vector<std::size_t> all(train.num_classes);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t t = 0; t < tasks; ++t) {
    std::vector<std::size_t> perm(train.dim());
    if (t == 0) std::iota(perm.begin(), perm.end(), 0);
    else perm = numcore::permutation(rng, train.dim());
    s.tasks.push_back({permute_features(train, perm), permute_features(test, perm), all, perm});
  }
  return s;
}

TaskStream make_split_stream(const Dataset& train, const Dataset& test,
                             const std::vector<std::vector<std::size_t>>& groups) {
  check_compatible(train, test);
  if (groups.empty()) throw InvalidArgument("a stream needs at least one task");
  std::set<std::size_t> seen;
  TaskStream s;
  s.kind = StreamKind::split;
  s.num_classes = train.num_classes;
  for (const auto& g : groups) {
    if (g.empty()) throw InvalidArgument("empty class group");
    for (std::size_t c : g) {
      if (c >= train.num_classes) throw InvalidArgument("class " + std::to_string(c) + " out of range");
      if (!seen.insert(c).second) throw InvalidArgument("class groups overlap at " + std::to_string(c));
    }
    Task task;
    task.classes = g;
    std::sort(task.classes.begin(), task.classes.end());
    task.train = train.subset(rows_of(train, task.classes));
    task.test = test.subset(rows_of(test, task.classes));
    for (std::size_t c : task.classes) {
      const auto has = [c](const Dataset& d) { return std::find(d.labels.begin(), d.labels.end(), c) != d.labels.end(); };
      if (!has(task.train) || !has(task.test)) throw InvalidArgument("class " + std::to_string(c) + " is missing");
    }
    task.permutation.resize(train.dim());
    std::iota(task.permutation.begin(), task.permutation.end(), 0);
    s.tasks.push_back(std::move(task));
  }
  return s;
}

std::vector<std::vector<std::size_t>> consecutive_pairs(std::size_t classes) {
  if (classes < 2 || classes % 2 != 0) throw InvalidArgument("consecutive pairs need an even class count");
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t c = 0; c < classes; c += 2) out.push_back({c, c + 1});
  return out;
}

}  // namespace evalbench::continual
