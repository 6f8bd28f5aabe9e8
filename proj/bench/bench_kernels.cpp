#include <benchmark/benchmark.h>

#include "evalbench/active/oracle.hpp"
#include "evalbench/active/simulate.hpp"
#include "evalbench/geometry/product.hpp"

using evalbench::numcore::RngStream;
namespace active = evalbench::active;
namespace geometry = evalbench::geometry;

namespace {

geometry::LayerStack stack3() {
  RngStream rng(1, 0);
  return geometry::LayerStack::random({3, 3, 3, 3}, rng);
}

std::vector<double> pool(std::size_t n) {
  RngStream rng(2, 0);
  std::vector<double> l(n);
  for (auto& v : l) v = rng.uniform();
  return l;
}

void BM_mc_cov(benchmark::State& st) {
  const auto s = stack3();
  for (auto _ : st) {
    RngStream rng(3, 0);
    benchmark::DoNotOptimize(geometry::mc_cov(s, static_cast<std::size_t>(st.range(0)), rng));
  }
}

void BM_mc_cov_serial(benchmark::State& st) {
  const auto s = stack3();
  for (auto _ : st) {
    RngStream rng(3, 0);
    benchmark::DoNotOptimize(geometry::mc_cov_serial(s, static_cast<std::size_t>(st.range(0)), rng));
  }
}

void BM_simulate(benchmark::State& st) {
  const auto l = pool(101);
  const auto rule = active::static_boltzmann_rule(l, 1.0);
  for (auto _ : st) {
    RngStream rng(4, 0);
    benchmark::DoNotOptimize(active::simulate_trajectories(l, rule, 30, static_cast<std::size_t>(st.range(0)), rng));
  }
}

void BM_simulate_serial(benchmark::State& st) {
  const auto l = pool(101);
  const auto rule = active::static_boltzmann_rule(l, 1.0);
  for (auto _ : st) {
    RngStream rng(4, 0);
    benchmark::DoNotOptimize(
        active::simulate_trajectories_serial(l, rule, 30, static_cast<std::size_t>(st.range(0)), rng));
  }
}

void BM_enumerate(benchmark::State& st) {
  const auto l = pool(7);
  const auto rule = active::static_boltzmann_rule(l, 1.0);
  for (auto _ : st)
    benchmark::DoNotOptimize(active::enumerate_expectation(l, rule, static_cast<std::size_t>(st.range(0)),
                                                           active::Estimator::r_lure));
}

void BM_enumerate_serial(benchmark::State& st) {
  const auto l = pool(7);
  const auto rule = active::static_boltzmann_rule(l, 1.0);
  for (auto _ : st)
    benchmark::DoNotOptimize(active::enumerate_expectation_serial(l, rule, static_cast<std::size_t>(st.range(0)),
                                                                  active::Estimator::r_lure));
}

}  // namespace

BENCHMARK(BM_mc_cov)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_cov_serial)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_serial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_enumerate)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_enumerate_serial)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
