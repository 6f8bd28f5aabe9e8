#pragma once

#include <utility>

#include "evalbench/continual/stream.hpp"

namespace evalbench::continual {

/// Greedy farthest-point traversal from `first`; returns k distinct row
/// indices in selection order. Ties go to the lowest index.
std::vector<std::size_t> kcenter_coreset(const Tensor& x, std::size_t k, std::size_t first);
/// Same with the first centre drawn uniformly.
std::vector<std::size_t> kcenter_coreset(const Tensor& x, std::size_t k, RngStream& rng);

/// Largest distance from a row to its nearest centre.
double covering_radius(const Tensor& x, std::span<const std::size_t> centres);

/// (coreset, remainder) of a task's training data.
std::pair<Dataset, Dataset> split_coreset(const Dataset& ds, std::size_t k, RngStream& rng);

}  // namespace evalbench::continual
