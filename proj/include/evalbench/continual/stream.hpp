#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evalbench/data/dataset.hpp"

namespace evalbench::continual {

using data::Dataset;
using numcore::RngStream;
using numcore::Tensor;

enum class StreamKind { permuted, split };

struct Task {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> classes;      // labels the task contains
  std::vector<std::size_t> permutation;  // feature permutation (permuted streams)
};

struct TaskStream {
  StreamKind kind = StreamKind::split;
  std::vector<Task> tasks;
  std::size_t num_classes = 0;
  std::size_t size() const { return tasks.size(); }
};

/// Task 0 is the base data; later tasks permute the feature columns with a
/// fresh permutation shared by train and test. Rows keep the base order.
TaskStream make_permuted_stream(const Dataset& train, const Dataset& test, std::size_t tasks, RngStream& rng);

/// One task per class group, holding exactly the rows of those classes.
/// Labels stay in the global C-way space. Throws on overlapping groups or a
/// class absent from either split.
TaskStream make_split_stream(const Dataset& train, const Dataset& test,
                             const std::vector<std::vector<std::size_t>>& groups);

/// (0,1), (2,3), ... for C classes (C even).
std::vector<std::vector<std::size_t>> consecutive_pairs(std::size_t classes);

/// Column j of the result is column perm[j] of the input.
Dataset permute_features(const Dataset& ds, std::span<const std::size_t> perm);
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm);

}  // namespace evalbench::continual
