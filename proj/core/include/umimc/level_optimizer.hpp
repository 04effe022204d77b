// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "umimc/lattice.hpp"

namespace umimc {

/// Sums a per-index table of I_0^cap over the sup-norm shells |alpha|_inf = k.
std::vector<double> shell_sums(const IndexBox& box, std::span<const double> per_index);

/// Aggregates over the blocks [shells[j], shells[j+1]) of consecutive levels.
struct ShellAggregate {
  std::vector<int> shells;
  std::vector<double> mu;
  std::vector<double> cost;
};
ShellAggregate aggregate_shells(std::span<const double> mu_levels,
                                std::span<const double> cost_levels,
                                const std::vector<int>& shells);

/*!
 * Work-variance product for a diagonal tail taking value F_k on level k:
 *
 *   g'(F) = ( sum_k nu_k / F_k - m^2 ) ( sum_k t_k F_k ).
 *
 * nu_levels and cost_levels are per-level sums of nu'_alpha and t_alpha.
 * Throws std::invalid_argument when F is infeasible (F_0 != 1, non-positive
 * or increasing).
 */
double objective_g_prime(std::span<const double> tail_values, std::span<const double> nu_levels,
                         std::span<const double> cost_levels, double mean);

/// Same objective written with mu'_0 = nu'_0 - m^2: (sum mu_k / F_k)(sum t_k F_k).
double objective_from_mu(std::span<const double> tail_values, std::span<const double> mu_levels,
                         std::span<const double> cost_levels);

/// F-dagger: sqrt(mu_i / t_i) / sqrt(mu_0 / t_0) entrywise.
/// Throws std::domain_error naming the first negative entry.
std::vector<double> unconstrained_optimum(std::span<const double> mu, std::span<const double> t);
/// Per-index variant over I_0^cap; errors name the offending multi-index.
std::vector<double> unconstrained_optimum(const IndexBox& box, std::span<const double> mu,
                                          std::span<const double> t);

struct OptimalSequence {
  std::vector<int> shells;       ///< first level of each shell, shells[0] = 0
  std::vector<double> values;    ///< F* on each shell, values[0] = 1
  std::vector<double> shell_mu;
  std::vector<double> shell_cost;
  double objective = 0.0;        ///< g'(F*) = (sum_j sqrt(mu_j t_j))^2
  int cap = 0;

  /// F* expanded to one value per level 0..cap.
  std::vector<double> level_values() const;
};

/// Feasible optimum of g' over non-increasing level values: adjacent levels
/// are pooled while sqrt(mu/t) fails to decrease strictly. Requires positive
/// per-level mu and cost.
OptimalSequence optimal_sequence(std::span<const double> mu_levels,
                                 std::span<const double> cost_levels);
OptimalSequence optimal_sequence(const IndexBox& box, std::span<const double> mu,
                                 std::span<const double> t);

/// Replaces negative entries with eps * max(entries) (eps = 1e-12 by default).
/// Returns how many entries were changed.
std::size_t floor_negative(std::vector<double>& values, double relative_floor = 1e-12);

}  // namespace umimc
