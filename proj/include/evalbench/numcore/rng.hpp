#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "evalbench/numcore/tensor.hpp"

namespace evalbench::numcore {

/// Counter-based random stream.
///
/// The key is a hash of (root_seed, stream_id); draw k is a keyed mix of the
/// counter k. Two streams built from the same pair yield identical sequences,
/// and child streams can be derived without touching shared state.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t root_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent stream keyed by this stream's identity and `child_id`.
  RngStream split(std::uint64_t child_id) const;

  std::uint64_t root_seed() const noexcept { return root_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t root_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t mix64(std::uint64_t x);

/// n standard normal draws as a rank-1 tensor.
Tensor gaussian(RngStream& rng, std::size_t n);

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> permutation(RngStream& rng, std::size_t n);

}  // namespace evalbench::numcore
