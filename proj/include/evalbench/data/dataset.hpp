#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evalbench/numcore/rng.hpp"
#include "evalbench/numcore/tensor.hpp"

namespace evalbench::data {

using numcore::RngStream;
using numcore::Tensor;

/// Features (n, d) with either class labels (num_classes > 0) or real
/// targets (num_classes == 0).
struct Dataset {
  Tensor x;
  std::vector<std::size_t> labels;
  std::vector<double> targets;
  std::size_t num_classes = 0;
  std::string provenance;

  std::size_t size() const { return x.rank() == 2 ? x.rows() : 0; }
  std::size_t dim() const { return x.rank() == 2 ? x.cols() : 0; }
  bool is_regression() const { return num_classes == 0; }

  /// Rows in the given order; labels/targets follow.
  Dataset subset(std::span<const std::size_t> idx) const;
  /// Throws InvalidArgument on non-finite features or out-of-range labels.
  void validate() const;
};

/// Concatenates rows of datasets with identical dim and label space.
Dataset concat(std::span<const Dataset> parts);

/// max(0, x) (|x|^{3/2} + sin(20 x) / 4)
double toy_target(double x);

/// Uniform draws inside [-1.2, -0.8], [0, 0.5], [1, 1.5] with the given
/// per-band counts; noiseless targets.
Dataset toy_regression(const std::vector<std::size_t>& cluster_sizes, RngStream& rng);

/// Two interleaved half circles, labels 0/1 alternating so counts differ by
/// at most one.
Dataset two_moons(std::size_t n, double noise_std, RngStream& rng);

/// Class c centred at separation * e_{c mod d}, unit isotropic noise. When
/// C > d the classes that wrap around are also shifted along e_{(c+1) mod d}
/// so that centres stay distinct.
Dataset blobs(std::size_t n_per_class, std::size_t classes, std::size_t d, double separation, RngStream& rng);

/// Non-negative "ink" images: class prototypes |N(0, 1)| * separation /
/// sqrt(active) on the first `active` features, drawn from `prototype_seed`.
/// Samples add unit noise there and clip at 0; the other d - active features
/// are exactly 0 (a blank border). Train and test sets built with the same
/// prototype seed share their class prototypes.
Dataset prototype_blobs(std::size_t n_per_class, std::size_t classes, std::size_t d, std::size_t active,
                        double separation, std::uint64_t prototype_seed, RngStream& rng);

/// Relabels a fraction of examples uniformly at random, then keeps each class
/// c with probability ratios[c] (class order follows the noisy labels).
/// Feature rows are never modified.
Dataset unbalance_and_noise(const Dataset& ds, const std::vector<double>& ratios, double label_noise_frac,
                            RngStream& rng);

/// Disjoint split; the validation part takes n_val shuffled rows.
std::pair<Dataset, Dataset> split_train_val(const Dataset& ds, std::size_t n_val, RngStream& rng);

/// Standardises every feature column to mean 0, std 1 (constant columns are
/// centred only). Returns the transformed dataset.
Dataset standardize(const Dataset& ds);

/// Big-endian IDX: images magic 0x00000803 (n, rows, cols), labels 0x00000801.
/// Pixels are scaled to [0, 1]. Throws ParseError on malformed input.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, bool normalize = false);
/// Writes features (must lie in [0, 1], rounded to u8) with the given image
/// shape, and labels.
void write_idx(const Dataset& ds, std::size_t rows, std::size_t cols, const std::filesystem::path& images,
               const std::filesystem::path& labels);

/// CSV with header index,x_0..x_{d-1},y.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace evalbench::data
