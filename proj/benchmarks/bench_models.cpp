// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "umimc/elliptic_model.hpp"
#include "umimc/spde_model.hpp"

namespace {

// Wall time per solve next to the nominal work 2^{|alpha|}.
void BM_EllipticSolve(benchmark::State& state) {
  const umimc::EllipticModel model;
  const umimc::MultiIndex alpha{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  const std::array<double, 2> y{0.3, -0.7};
  for (auto _ : state) benchmark::DoNotOptimize(model.evaluate(alpha, y));
  state.counters["nominal_work"] = model.cost(alpha);
}

BENCHMARK(BM_EllipticSolve)
    ->Args({0, 0})
    ->Args({1, 1})
    ->Args({2, 2})
    ->Args({3, 3})
    ->Args({4, 4})
    ->Args({5, 5})
    ->Args({5, 3})
    ->Unit(benchmark::kMicrosecond);

void BM_SpdePath(benchmark::State& state) {
  const umimc::SpdeModel model;
  const umimc::MultiIndex alpha{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  umimc::RandomStream rng(3);
  const auto driver = model.make_driver(alpha, rng);
  for (auto _ : state) benchmark::DoNotOptimize(model.exponential_euler_path(alpha, driver));
  state.counters["nominal_work"] = model.cost(alpha);
}

BENCHMARK(BM_SpdePath)
    ->Args({0, 0})
    ->Args({2, 2})
    ->Args({4, 4})
    ->Args({6, 6})
    ->Args({7, 7})
    ->Unit(benchmark::kMicrosecond);

void BM_SpdeDriver(benchmark::State& state) {
  const umimc::SpdeModel model;
  const umimc::MultiIndex finest{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  umimc::RandomStream rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(model.make_driver(finest, rng));
}

BENCHMARK(BM_SpdeDriver)->DenseRange(3, 7, 2)->Unit(benchmark::kMicrosecond);

}  // namespace
