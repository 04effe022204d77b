// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "umimc/lattice.hpp"
#include "umimc/model.hpp"
#include "umimc/random_stream.hpp"
#include "umimc/tail_distribution.hpp"

namespace umimc {

enum class EstimatorKind {
  CoupledSum,          ///< one omega for every increment, weights P(N >= alpha)
  DiagonalCoupled,     ///< coupled sum with scalar N, weights P(N >= |alpha|_inf)
  IndependentSum,      ///< fresh omega per increment
  DiagonalIndependent  ///< independent sum with scalar N
};

bool is_diagonal(EstimatorKind kind);
bool is_coupled(EstimatorKind kind);
std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view name);

/// One realization of an unbiased estimator.
struct Draw {
  MultiIndex n;
  std::vector<double> value;
  double cost = 0.0;
  /// Set when no index of I_0^n was admissible; value is then 0 at zero cost.
  bool degenerate = false;
};

/// Visits every admissible increment of I_0^upper in colexicographic order.
/// With `coupled` all increments come from one realization whose corners are
/// computed once; otherwise every increment gets its own realization. The
/// callback receives the increment and the work charged to it. Returns the
/// total work.
using IncrementVisitor =
    std::function<void(const MultiIndex& alpha, std::span<const double> increment, double cost)>;
double for_each_increment(const Model& model, const MultiIndex& upper, RandomStream& rng,
                          bool coupled, const IncrementVisitor& visit);

Draw draw_coupled(const Model& model, const TailDistribution& tail, RandomStream& rng);
Draw draw_diagonal_coupled(const Model& model, const TailDistribution& tail, RandomStream& rng);
Draw draw_independent(const Model& model, const TailDistribution& tail, RandomStream& rng);
Draw draw_diagonal_independent(const Model& model, const TailDistribution& tail,
                               RandomStream& rng);
Draw draw(EstimatorKind kind, const Model& model, const TailDistribution& tail,
          RandomStream& rng);

/*!
 * Accumulators of the count-normalized practical estimator
 *
 *   sum_alpha ( sum_i Delta_{alpha,i} ) / c_alpha,
 *   c_alpha = #{ j : n_j >= |alpha|_inf },
 *
 * over the truncated box I_0^cap. Sums and counts add, so two estimates built
 * from independent streams merge by plain addition.
 */
class RunningEstimate {
 public:
  RunningEstimate(std::size_t dim, std::size_t width, int cap);

  std::size_t dim() const { return box_.dim(); }
  std::size_t width() const { return width_; }
  int cap() const { return cap_; }
  const IndexBox& box() const { return box_; }

  /// Registers iteration i with sampled level n_i (clamped to the cap).
  void begin_iteration(int level);
  void add_increment(const MultiIndex& alpha, std::span<const double> increment, double cost);

  std::uint64_t iterations() const { return iterations_; }
  double cost() const { return cost_; }
  /// c_alpha, shared by the whole shell |alpha|_inf = k.
  std::uint64_t hits(const MultiIndex& alpha) const;
  std::uint64_t shell_hits(int k) const { return shell_hits_.at(static_cast<std::size_t>(k)); }
  /// Number of increments actually sampled at alpha.
  std::uint64_t samples(const MultiIndex& alpha) const;

  /// Current estimate; indices never hit contribute zero.
  std::vector<double> estimate() const;

  std::vector<double> mean_increment(const MultiIndex& alpha) const;
  /// Raw second moment E[Delta Delta^T], width x width row-major.
  std::vector<double> increment_cross_moment(const MultiIndex& alpha) const;
  double mean_cost(const MultiIndex& alpha) const;

  void merge(const RunningEstimate& other);

 private:
  IndexBox box_;
  std::size_t width_;
  int cap_;
  std::vector<double> sums_;
  std::vector<double> cross_;
  std::vector<double> cost_sums_;
  std::vector<std::uint64_t> samples_;
  std::vector<std::uint64_t> shell_hits_;
  std::uint64_t iterations_ = 0;
  double cost_ = 0.0;
};

struct TrajectoryPoint {
  std::uint64_t iteration = 0;
  double cost = 0.0;
  std::vector<double> estimate;
  /// Wall-clock seconds since the run started.
  double seconds = 0.0;
};

/// Scalarization of vector-valued increments used for moment estimates; it
/// receives the current estimate and returns one weight per component.
using MomentWeights = std::function<std::vector<double>(std::span<const double> estimate)>;

/// Returns a replacement tail (or nothing to keep the current one).
using TailRefresh = std::function<std::optional<TailDistribution>(const RunningEstimate&)>;

struct AdaptiveOptions {
  EstimatorKind kind = EstimatorKind::DiagonalIndependent;
  int cap = 0;
  double budget = 0.0;
  /// Starting law of N; must be diagonal. It is truncated at the cap.
  std::optional<TailDistribution> initial_tail;
  bool adapt = true;
  /// Every shell must have this many hits before the first refresh.
  std::uint64_t min_shell_hits = 50;
  /// Refresh again after ceil(M / refresh_divisor) further iterations.
  std::uint64_t refresh_divisor = 20;
  /// Custom refresh; defaults to optimal_tail_refresh with `weights`.
  TailRefresh refresh;
  MomentWeights weights;
  bool record_trajectory = true;
};

struct AdaptiveRun {
  RunningEstimate state;
  std::vector<TrajectoryPoint> trajectory;
  TailDistribution final_tail;
  std::size_t refreshes = 0;
  /// Count of negative moment entries floored during refreshes.
  std::size_t floored_entries = 0;
};

/// Practical estimator with count normalization and periodic re-optimization
/// of the truncation law. Runs until the accumulated work reaches the budget.
AdaptiveRun run_adaptive(const Model& model, const AdaptiveOptions& options, RandomStream& rng);

/// Default refresh: estimates nu~'_alpha from the running sums (the limit
/// proxied by the cap level) with the observed per-index work as t_alpha,
/// floors negative entries and returns the optimal diagonal tail.
/// `floored` (optional) receives the number of floored entries.
std::optional<TailDistribution> optimal_tail_refresh(const RunningEstimate& state,
                                                     std::span<const double> weights,
                                                     std::size_t* floored = nullptr);

}  // namespace umimc
