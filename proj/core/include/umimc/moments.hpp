// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "umimc/estimators.hpp"
#include "umimc/lattice.hpp"
#include "umimc/model.hpp"
#include "umimc/random_stream.hpp"
#include "umimc/tail_distribution.hpp"

namespace umimc {

/*!
 * Increment moments over I_0^cap, with the unknown limit S replaced by the
 * cap-level approximation S_cap. With that substitution the second-moment
 * formulas below are exact for the estimators truncated at the cap.
 *
 * Diagonal levels use S_k = S_(k,...,k) and S_{-1} = 0.
 */
struct IncrementMomentTable {
  IndexBox box;
  int cap = 0;
  double mean_limit = 0.0;               ///< m = E[S_cap]
  double mean_limit_stderr = 0.0;
  std::vector<double> mean_increment;    ///< E[Delta S_alpha]
  std::vector<double> nu_prime;          ///< E[Delta S_alpha (2 S - S_{k-1} - S_k)]
  std::vector<double> nu_tilde_prime;    ///< var(Delta S_alpha) + E Delta (2 E S - E S_{k-1} - E S_k)
  std::vector<double> nu_prime_stderr;
  std::vector<double> mean_increment_stderr;
  /// E[Delta S_alpha Delta S_beta], box.size()^2 row-major.
  std::vector<double> pair;
  /// E[(S - S_k)^2] for k = -1..cap, stored at k + 1.
  std::vector<double> diagonal_distance;
  /// Work per increment: coupled (fresh corners in colex order) and
  /// independent (every distinct corner).
  std::vector<double> cost_coupled;
  std::vector<double> cost_independent;
  std::size_t samples = 0;

  explicit IncrementMomentTable(IndexBox b);

  double nu(const MultiIndex& a, const MultiIndex& b) const;
  /// mu'_alpha for the given estimator: nu' (coupled) or nu-tilde' (independent),
  /// minus m^2 at the origin.
  std::vector<double> mu_prime(EstimatorKind kind) const;
  const std::vector<double>& cost(EstimatorKind kind) const;
};

/// Exact table from closed-form first and mixed second moments of S.
IncrementMomentTable exact_moment_table(
    const Model& model, int cap, const std::function<double(const MultiIndex&)>& mean,
    const std::function<double(const MultiIndex&, const MultiIndex&)>& product_moment);

/// Pilot estimate from `pilot` coupled realizations evaluated on all of I_0^cap.
/// Vector-valued models are scalarized with `weights` (default: first component).
IncrementMomentTable estimate_moment_tables(const Model& model, std::size_t pilot, int cap,
                                            RandomStream& rng,
                                            std::span<const double> weights = {});

/// E[Z^2] for the coupled sum truncated at the table cap:
/// sum_{alpha,beta} nu_{alpha,beta} F(alpha v beta) / (F(alpha) F(beta)).
double second_moment_coupled(const IncrementMomentTable& table, const TailDistribution& tail);
/// E[Z'^2] = sum_alpha nu'_alpha / P(N >= |alpha|_inf).
double second_moment_diagonal_coupled(const IncrementMomentTable& table,
                                      const TailDistribution& tail);
/// E[Z~'^2] = sum_alpha nu~'_alpha / P(N >= |alpha|_inf).
double second_moment_diagonal_independent(const IncrementMomentTable& table,
                                          const TailDistribution& tail);
/// Single-sum form sum_k (||S_{k-1} - S||^2 - ||S_k - S||^2) / P(N >= k).
double second_moment_level_sum(const IncrementMomentTable& table, const TailDistribution& tail);

/// Truncated version of the finite-variance series
/// sum_{alpha,beta} Delta||S_alpha - S|| Delta||S_beta - S|| / P(N >= alpha v beta)
/// over I_0^n, with Delta acting on the table of L2 distances to the limit.
double variance_condition_series(const IndexBox& box,
                                 const std::function<double(const MultiIndex&)>& distance,
                                 const TailDistribution& tail);

}  // namespace umimc
