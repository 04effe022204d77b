// SPDX-License-Identifier: Apache-2.0
#include "umimc/mimc.hpp"

#include <boost/math/distributions/normal.hpp>

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace umimc {

void MimcConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("TOL must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0,1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
  if (pilot < 2) throw std::invalid_argument("pilot size must be >= 2");
  if (alpha_max.dim() == 0) throw std::invalid_argument("alpha_max is empty");
}

double MimcConfig::confidence_constant() const {
  const boost::math::normal_distribution<double> z;
  return boost::math::quantile(z, 1.0 - 0.5 * epsilon);
}

std::vector<std::uint64_t> allocate_samples(const std::vector<double>& variances,
                                            const std::vector<double>& costs,
                                            const MimcConfig& config) {
  if (variances.size() != costs.size()) throw std::invalid_argument("size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (variances[i] < 0.0 || !(costs[i] > 0.0)) {
      throw std::invalid_argument("variances must be >= 0 and costs > 0");
    }
    s += std::sqrt(variances[i] * costs[i]);
  }
  const double scale = std::pow(config.confidence_constant() / (config.theta * config.tol), 2);
  std::vector<std::uint64_t> n(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) {
    n[i] = static_cast<std::uint64_t>(std::ceil(scale * std::sqrt(variances[i] / costs[i]) * s));
  }
  return n;
}

namespace {

struct IndexAccumulator {
  std::vector<double> sum;
  double mean = 0.0;  // Welford on the scalarized increment
  double m2 = 0.0;
  double cost = 0.0;
  std::uint64_t n = 0;
};

}  // namespace

MimcRun run_mimc(const Model& model, const MimcConfig& config, RandomStream& rng) {
  config.validate();
  if (config.alpha_max.dim() != model.dimension()) {
    throw std::invalid_argument("alpha_max dimension does not match the model");
  }
  const std::size_t width = model.width();
  std::vector<double> w(width, 0.0);
  if (config.weights.empty()) {
    w[0] = 1.0;
  } else if (config.weights.size() == width) {
    w = config.weights;
  } else {
    throw std::invalid_argument("MIMC weights width mismatch");
  }

  MimcRun run;
  run.confidence_constant = config.confidence_constant();
  for (const auto& a : IndexBox(config.alpha_max).enumerate()) {
    if (model.admissible(a)) run.indices.push_back(a);
  }
  const std::size_t m = run.indices.size();
  std::vector<IndexAccumulator> acc(m);
  for (auto& a : acc) a.sum.assign(width, 0.0);

  auto current_estimate = [&] {
    std::vector<double> est(width, 0.0);
    for (const auto& a : acc) {
      if (a.n == 0) continue;
      for (std::size_t c = 0; c < width; ++c) est[c] += a.sum[c] / static_cast<double>(a.n);
    }
    return est;
  };
  const auto started = std::chrono::steady_clock::now();
  std::uint64_t batches = 0;
  auto sample = [&](std::size_t i, std::uint64_t count) {
    auto& a = acc[i];
    for (std::uint64_t j = 0; j < count; ++j) {
      const CornerValues cv = sample_coupled(model, run.indices[i], rng);
      const auto inc = cv.increment();
      double x = 0.0;
      for (std::size_t c = 0; c < width; ++c) {
        a.sum[c] += inc[c];
        x += w[c] * inc[c];
      }
      ++a.n;
      const double delta = x - a.mean;
      a.mean += delta / static_cast<double>(a.n);
      a.m2 += delta * (x - a.mean);
      a.cost += cv.cost;
      run.total_cost += cv.cost;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    run.trajectory.push_back({++batches, run.total_cost, current_estimate(), elapsed.count()});
  };

  for (std::size_t i = 0; i < m; ++i) sample(i, config.pilot);

  run.variances.resize(m);
  run.costs.resize(m);
  bool any_variance = false;
  for (std::size_t i = 0; i < m; ++i) {
    run.variances[i] = acc[i].m2 / static_cast<double>(acc[i].n - 1);
    run.costs[i] = acc[i].cost / static_cast<double>(acc[i].n);
    any_variance = any_variance || run.variances[i] > 0.0;
  }
  run.uniform_fallback = !any_variance;
  if (any_variance) {
    const auto target = allocate_samples(run.variances, run.costs, config);
    for (std::size_t i = 0; i < m; ++i) {
      if (target[i] > acc[i].n) sample(i, target[i] - acc[i].n);
    }
  }
  run.samples.resize(m);
  for (std::size_t i = 0; i < m; ++i) run.samples[i] = acc[i].n;
  run.estimate = current_estimate();
  return run;
}

}  // namespace umimc
