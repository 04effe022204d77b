// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "umimc/level_optimizer.hpp"
#include "umimc/random_stream.hpp"

namespace {

void BM_OptimalSequence(benchmark::State& state) {
  const auto levels = static_cast<std::size_t>(state.range(0));
  umimc::RandomStream rng(5);
  std::vector<double> mu(levels), t(levels);
  double cost = 1.0;
  for (std::size_t k = 0; k < levels; ++k) {
    mu[k] = std::exp(rng.uniform(-5.0, 1.0)) * std::exp2(-2.0 * static_cast<double>(k));
    cost *= 2.0;
    t[k] = cost;
  }
  for (auto _ : state) benchmark::DoNotOptimize(umimc::optimal_sequence(mu, t));
  state.SetComplexityN(state.range(0));
}

BENCHMARK(BM_OptimalSequence)->RangeMultiplier(4)->Range(4, 256)->Complexity();

}  // namespace
