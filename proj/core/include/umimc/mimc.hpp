// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "umimc/estimators.hpp"
#include "umimc/lattice.hpp"
#include "umimc/model.hpp"
#include "umimc/random_stream.hpp"

namespace umimc {

struct MimcConfig {
  double tol = 5e-3;
  double theta = 0.5;
  double epsilon = 0.25;
  MultiIndex alpha_max{3, 3};
  std::size_t pilot = 20;
  /// Scalarization of vector-valued increments for the variance estimates;
  /// empty means the first component.
  std::vector<double> weights;

  void validate() const;
  /// Gaussian quantile C with P(|Z| <= C) = 1 - epsilon.
  double confidence_constant() const;
};

/// n_alpha = ceil((C / (theta tol))^2 sqrt(V_alpha / t_alpha) sum_beta sqrt(V_beta t_beta)).
std::vector<std::uint64_t> allocate_samples(const std::vector<double>& variances,
                                            const std::vector<double>& costs,
                                            const MimcConfig& config);

struct MimcRun {
  /// Every admissible index of I_0^{alpha_max}, colexicographic order.
  std::vector<MultiIndex> indices;
  std::vector<std::uint64_t> samples;
  std::vector<double> variances;
  std::vector<double> costs;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<double> estimate;
  double total_cost = 0.0;
  double confidence_constant = 0.0;
  /// Set when the pilot saw no variance at all; no samples beyond the pilot
  /// are then allocated.
  bool uniform_fallback = false;
};

/*!
 * Multi-index Monte Carlo over the fixed box I_0^{alpha_max}: a pilot of
 * `pilot` coupled samples per index (colexicographic order) estimates V_alpha
 * and t_alpha, then every index is topped up to its variance/cost-optimal
 * count. The trajectory gets one point per completed batch.
 */
MimcRun run_mimc(const Model& model, const MimcConfig& config, RandomStream& rng);

}  // namespace umimc
