#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "evalbench/data/dataset.hpp"
#include "evalbench/numcore/autodiff.hpp"
#include "evalbench/numcore/error.hpp"
#include "evalbench/numcore/mlp.hpp"

using namespace evalbench::data;
using evalbench::ParseError;
using namespace evalbench::numcore;

namespace {

// Full-batch gradient descent on softmax cross-entropy; returns train accuracy.
double fit_accuracy(const Dataset& ds, std::vector<std::size_t> widths, int steps, double lr) {
  RngStream rng(77, 0);
  std::vector<Tensor> ws;
  widths.insert(widths.begin(), ds.dim());
  widths.push_back(ds.num_classes);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Tensor w({widths[l + 1], widths[l] + 1});
    for (auto& v : w.data()) v = rng.normal() * std::sqrt(1.0 / widths[l]);
    ws.push_back(std::move(w));
  }
  for (int s = 0; s < steps; ++s) {
    Tape tape;
    std::vector<Var> p;
    for (auto& w : ws) p.push_back(tape.leaf(w));
    Var out = mlp_forward(p, Activation::relu(), tape.constant(ds.x));
    tape.backward(ad::scale(ad::sum(ad::softmax_cross_entropy(out, ds.labels)), 1.0 / ds.size()));
    for (std::size_t l = 0; l < ws.size(); ++l)
      for (std::size_t i = 0; i < ws[l].size(); ++i) ws[l][i] -= lr * p[l].grad()[i];
  }
  Tensor logits = mlp_forward(ws, Activation::relu(), ds.x).back();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto row = logits.row(i);
    const auto pred = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    correct += pred == ds.labels[i];
  }
  return static_cast<double>(correct) / ds.size();
}

std::filesystem::path tmpdir() {
  auto p = std::filesystem::temp_directory_path() / "evalbench_data_test";
  std::filesystem::create_directories(p);
  return p;
}

void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST_CASE("toy regression target and bands") {
  CHECK(toy_target(-1.0) == 0.0);
  CHECK(toy_target(0.5) == doctest::Approx(0.5 * (std::pow(0.5, 1.5) + std::sin(10.0) / 4)));
  CHECK(toy_target(0.5) == doctest::Approx(0.10877).epsilon(1e-4));
  RngStream rng(1, 0);
  Dataset ds = toy_regression({5, 48, 48}, rng);
  CHECK(ds.size() == 101);
  for (double x : ds.x.data()) {
    const bool in = (x >= -1.2 && x <= -0.8) || (x >= 0 && x <= 0.5) || (x >= 1 && x <= 1.5);
    CHECK(in);
  }
  ds.validate();
}

TEST_CASE("two moons") {
  RngStream rng(2, 0);
  Dataset clean = two_moons(101, 0.0, rng);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double a = clean.x.at(i, 0), b = clean.x.at(i, 1);
    const double r = clean.labels[i] == 0 ? std::hypot(a, b) : std::hypot(a - 1.0, b - 0.5);
    CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    ones += clean.labels[i];
  }
  CHECK((ones == 50 || ones == 51));

  Dataset noisy = two_moons(500, 0.1, rng);
  const double linear = fit_accuracy(noisy, {}, 2000, 0.5);
  const double mlp = fit_accuracy(noisy, {32}, 3000, 0.5);
  CHECK(linear < 0.95);
  CHECK(mlp > 0.95);
}

TEST_CASE("blobs") {
  RngStream a(3, 0), b(3, 0);
  CHECK(blobs(10, 3, 4, 5.0, a).x == blobs(10, 3, 4, 5.0, b).x);
  RngStream rng(4, 0);
  CHECK(fit_accuracy(blobs(100, 5, 8, 10.0, rng), {}, 300, 0.2) > 0.99);
  CHECK(fit_accuracy(blobs(100, 5, 8, 0.0, rng), {}, 300, 0.2) < 0.35);
}

TEST_CASE("unbalance and noise") {
  RngStream rng(5, 0);
  Dataset base = blobs(1000, 10, 16, 5.0, rng);
  Dataset same = unbalance_and_noise(base, std::vector<double>(10, 1.0), 0.0, rng);
  CHECK(same.x == base.x);
  CHECK(same.labels == base.labels);

  Dataset u = unbalance_and_noise(base, {1, 0.5, 0.5, 0.2, 0.2, 0.2, 0.1, 0.1, 0.01, 0.01}, 0.0, rng);
  std::size_t c9 = std::count(u.labels.begin(), u.labels.end(), 9u);
  std::size_t c0 = std::count(u.labels.begin(), u.labels.end(), 0u);
  CHECK(c9 == 10);
  CHECK(c0 == 1000);
  // Rows are copied untouched from the base.
  std::set<std::vector<double>> rows;
  for (std::size_t i = 0; i < base.size(); ++i) rows.insert({base.x.row(i).begin(), base.x.row(i).end()});
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(rows.count({u.x.row(i).begin(), u.x.row(i).end()}) == 1);

  Dataset small = blobs(200, 4, 4, 10.0, rng);
  Dataset all_noise = unbalance_and_noise(small, {1, 1, 1, 1}, 1.0, rng);
  CHECK(fit_accuracy(all_noise, {}, 300, 0.2) < 0.35);
  CHECK_THROWS(unbalance_and_noise(blobs(10, 2, 2, 1.0, rng), {1.0, 0.001}, 0.0, rng));
}

TEST_CASE("split train val") {
  RngStream rng(6, 0);
  Dataset ds = blobs(20, 3, 2, 1.0, rng);
  RngStream a(7, 0), b(7, 0);
  auto [tr, va] = split_train_val(ds, 0, a);
  CHECK(va.size() == 0);
  CHECK(tr.size() == 60);
  auto s1 = split_train_val(ds, 15, a);
  RngStream a2(7, 0);
  split_train_val(ds, 0, a2);
  auto s2 = split_train_val(ds, 15, a2);
  CHECK(s1.first.x == s2.first.x);
  CHECK(s1.first.size() + s1.second.size() == 60);
  std::set<std::vector<double>> tr_rows;
  for (std::size_t i = 0; i < s1.first.size(); ++i) tr_rows.insert({s1.first.x.row(i).begin(), s1.first.x.row(i).end()});
  for (std::size_t i = 0; i < s1.second.size(); ++i)
    CHECK(tr_rows.count({s1.second.x.row(i).begin(), s1.second.x.row(i).end()}) == 0);
}

TEST_CASE("IDX fixture, mismatch and round trip") {
  auto dir = tmpdir();
  // Two 2x2 images built byte by byte.
  write_bytes(dir / "img", {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2, 0, 255, 51, 102, 255, 0, 0, 204});
  write_bytes(dir / "lab", {0, 0, 8, 1, 0, 0, 0, 2, 3, 7});
  Dataset ds = load_idx(dir / "img", dir / "lab");
  CHECK(ds.x.values() == std::vector<double>{0, 1, 0.2, 0.4, 1, 0, 0, 0.8});
  CHECK(ds.labels == std::vector<std::size_t>{3, 7});

  write_bytes(dir / "lab3", {0, 0, 8, 1, 0, 0, 0, 3, 3, 7, 1});
  CHECK_THROWS_AS(load_idx(dir / "img", dir / "lab3"), ParseError);
  write_bytes(dir / "bad", {0, 0, 8, 4, 0, 0, 0, 2});
  CHECK_THROWS_AS(load_idx(dir / "bad", dir / "lab"), ParseError);
  write_bytes(dir / "short", {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2, 0, 255});
  CHECK_THROWS_AS(load_idx(dir / "short", dir / "lab"), ParseError);

  write_idx(ds, 2, 2, dir / "img2", dir / "lab2");
  Dataset back = load_idx(dir / "img2", dir / "lab2");
  CHECK(back.x == ds.x);
  CHECK(back.labels == ds.labels);

  Dataset z = load_idx(dir / "img", dir / "lab", true);
  for (std::size_t k = 0; k < 4; ++k) CHECK(z.x.at(0, k) + z.x.at(1, k) == doctest::Approx(0.0));
}

TEST_CASE("csv export header") {
  RngStream rng(8, 0);
  Dataset ds = toy_regression({1, 1, 1}, rng);
  auto p = tmpdir() / "toy.csv";
  write_csv(ds, p);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "index,x_0,y");
}

TEST_CASE("prototype blobs") {
  RngStream a(3, 0), b(3, 0), c(4, 0);
  const Dataset x = prototype_blobs(400, 3, 10, 4, 6.0, 17, a);
  const Dataset y = prototype_blobs(400, 3, 10, 4, 6.0, 17, b);
  CHECK(x.labels == y.labels);
  CHECK(std::ranges::equal(x.x.data(), y.x.data()));
  CHECK(x.size() == 1200);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < 10; ++k) {
      CHECK(x.x.at(i, k) >= 0.0);
      if (k >= 4) CHECK(x.x.at(i, k) == 0.0);
    }
  // a second draw with the same prototype seed shares the class means
  const Dataset z = prototype_blobs(400, 3, 10, 4, 6.0, 17, c);
  for (std::size_t cls = 0; cls < 3; ++cls)
    for (std::size_t k = 0; k < 4; ++k) {
      double mx = 0.0, mz = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.labels[i] == cls) mx += x.x.at(i, k) / 400.0;
        if (z.labels[i] == cls) mz += z.x.at(i, k) / 400.0;
      }
      CHECK(std::abs(mx - mz) < 0.25);  // about 5 s.e. of a difference of means
    }
  CHECK_THROWS_AS(prototype_blobs(10, 3, 4, 5, 1.0, 1, a), evalbench::InvalidArgument);
}
