// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "umimc/estimators.hpp"
#include "umimc/synthetic_model.hpp"

namespace {

void BM_Draw(benchmark::State& state) {
  const auto kind = static_cast<umimc::EstimatorKind>(state.range(0));
  const std::size_t dim = static_cast<std::size_t>(state.range(1));
  const umimc::SyntheticProductModel model(std::vector<double>(dim, 2.0), 0.3, 0.2);
  const double rho = std::exp2(-1.5);
  const auto tail = kind == umimc::EstimatorKind::CoupledSum || kind == umimc::EstimatorKind::IndependentSum
                        ? umimc::TailDistribution::product_geometric(std::vector<double>(dim, rho)).truncated(6)
                        : umimc::TailDistribution::diagonal_geometric(dim, rho).truncated(6);
  umimc::RandomStream rng(1);
  double work = 0.0;
  for (auto _ : state) {
    const auto d = umimc::draw(kind, model, tail, rng);
    work += d.cost;
    benchmark::DoNotOptimize(d.value[0]);
  }
  state.counters["work_per_draw"] = benchmark::Counter(work, benchmark::Counter::kAvgIterations);
  state.SetLabel(std::string(umimc::to_string(kind)));
}

BENCHMARK(BM_Draw)->ArgsProduct({{0, 1, 2, 3}, {1, 2, 3}});

void BM_Adaptive(benchmark::State& state) {
  const umimc::SyntheticProductModel model({2.0, 2.0}, 0.3, 0.2);
  umimc::AdaptiveOptions opt;
  opt.budget = static_cast<double>(state.range(0));
  opt.cap = 4;
  opt.record_trajectory = false;
  opt.initial_tail = umimc::TailDistribution::diagonal_geometric(2, std::exp2(-1.5));
  for (auto _ : state) {
    umimc::RandomStream rng(2);
    benchmark::DoNotOptimize(umimc::run_adaptive(model, opt, rng));
  }
}

BENCHMARK(BM_Adaptive)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
