#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "evalbench/data/dataset.hpp"
#include "evalbench/numcore/error.hpp"

namespace evalbench::data {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<unsigned char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t off, const std::filesystem::path& p) {
  if (off + 4 > b.size()) throw ParseError(p.string() + ": truncated header");
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
         std::uint32_t{b[off + 3]};
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                         static_cast<char>(v)};
  out.write(bytes, 4);
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, bool normalize) {
  const auto ib = slurp(images);
  const auto lb = slurp(labels);
  if (be32(ib, 0, images) != kImagesMagic) throw ParseError(images.string() + ": bad magic for IDX images");
  if (be32(lb, 0, labels) != kLabelsMagic) throw ParseError(labels.string() + ": bad magic for IDX labels");
  const std::size_t n = be32(ib, 4, images);
  const std::size_t rows = be32(ib, 8, images);
  const std::size_t cols = be32(ib, 12, images);
  const std::size_t nl = be32(lb, 4, labels);
  if (n != nl) throw ParseError("IDX count mismatch: " + std::to_string(n) + " images vs " + std::to_string(nl) + " labels");
  const std::size_t d = rows * cols;
  if (ib.size() != 16 + n * d) throw ParseError(images.string() + ": truncated or oversized payload");
  if (lb.size() != 8 + n) throw ParseError(labels.string() + ": truncated or oversized payload");

  Dataset ds;
  ds.provenance = "idx:" + images.filename().string();
  std::vector<double> f(n * d);
  for (std::size_t i = 0; i < n * d; ++i) f[i] = static_cast<double>(ib[16 + i]) / 255.0;
  ds.x = Tensor({n, d}, std::move(f));
  std::size_t max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels.push_back(lb[8 + i]);
    max_label = std::max<std::size_t>(max_label, lb[8 + i]);
  }
  ds.num_classes = n == 0 ? 0 : max_label + 1;
  return normalize ? standardize(ds) : ds;
}

void write_idx(const Dataset& ds, std::size_t rows, std::size_t cols, const std::filesystem::path& images,
               const std::filesystem::path& labels) {
  if (ds.dim() != rows * cols) throw DimensionError("write_idx: feature width does not match image shape");
  if (ds.labels.size() != ds.size()) throw InvalidArgument("write_idx needs class labels");
  std::ofstream img(images, std::ios::binary), lab(labels, std::ios::binary);
  if (!img || !lab) throw ParseError("write_idx: cannot open output files");
  put_be32(img, kImagesMagic);
  put_be32(img, static_cast<std::uint32_t>(ds.size()));
  put_be32(img, static_cast<std::uint32_t>(rows));
  put_be32(img, static_cast<std::uint32_t>(cols));
  for (double v : ds.x.data()) {
    if (v < 0.0 || v > 1.0) throw InvalidArgument("write_idx: pixel outside [0, 1]");
    img.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  put_be32(lab, kLabelsMagic);
  put_be32(lab, static_cast<std::uint32_t>(ds.size()));
  for (auto l : ds.labels) {
    if (l > 255) throw InvalidArgument("write_idx: label does not fit in a byte");
    lab.put(static_cast<char>(l));
  }
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string());
  out << "index";
  for (std::size_t k = 0; k < ds.dim(); ++k) out << ",x_" << k;
  out << ",y\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << i;
    for (double v : ds.x.row(i)) out << ',' << v;
    if (ds.is_regression()) out << ',' << ds.targets[i] << '\n';
    else out << ',' << ds.labels[i] << '\n';
  }
}

}  // namespace evalbench::data
