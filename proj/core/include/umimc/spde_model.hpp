// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "umimc/model.hpp"

namespace umimc {

struct SpdeConfig {
  double horizon = 0.1;
  /// Variance q_n of every Brownian mode.
  double mode_variance = 0.01;
  /// Coefficient r of the reaction term r u; 0 switches it off.
  double reaction = 0.5;
  double obs_sigma = 0.025;
  /// Inference uses obs_sigma * inflation.
  double inflation = 4.0;
  int obs_times = 3;
  int obs_locations = 4;
  /// Mode-count exponent and time-step exponent of the finest estimator index.
  MultiIndex alpha_max{5, 5};
  /// Data and references use alpha_max + master_offset in every axis.
  int master_offset = 2;
  /// Fold the reaction term into the linear rate (n^2 pi^2 - r) instead of
  /// treating it explicitly.
  bool full_linear = false;
  /// Integrate the stochastic convolution with its exact per-step variance.
  bool exact_variance = false;

  void validate() const;
  MultiIndex master() const;
  double inference_sigma() const { return obs_sigma * inflation; }
};

/// Scaled Gaussian increments dbeta^n_j ~ N(0, dt) on a dyadic time grid.
/// Coarser grids are exact pairwise sums, fewer modes are a prefix.
class BrownianDriver {
 public:
  BrownianDriver(int modes, int time_level, double horizon, RandomStream& rng);

  int modes() const { return modes_; }
  int time_level() const { return time_level_; }
  /// Increments of `mode` (0-based) on the grid with 2^level steps.
  std::span<const double> increments(int mode, int level) const;

 private:
  int modes_;
  int time_level_;
  /// levels_[l] holds modes_ x 2^l increments, mode-major; built lazily.
  mutable std::vector<std::vector<double>> levels_;
};

/// Spectral coefficients of one discretized path, sampled at the observation
/// times (by linear interpolation on the time grid) and at the horizon.
struct SpectralPath {
  MultiIndex alpha;
  int modes = 0;
  int steps = 0;
  /// obs_times x modes, row-major.
  std::vector<double> observed;
  std::vector<double> final;
};

struct SpdeObservations {
  std::uint64_t seed = 0;
  int times = 0;
  int locations = 0;
  /// times x locations, row-major.
  std::vector<double> values;
  /// phi of the hidden master path.
  double truth_integral = 0.0;
};

/// Gaussian log density sum_l log N(y_l; x_l, sigma^2).
double gaussian_log_likelihood(std::span<const double> y, std::span<const double> x,
                               double sigma);

/*!
 * du = (u_xx + r u) dt + dW on (0, 1) with Dirichlet boundary, W = sum_n sqrt(q) e_n beta^n,
 * e_n = sqrt(2) sin(n pi x), c_n(0) = 1/n, solved by exponential Euler on the
 * first 2 * 2^{alpha_1} modes with 2^{alpha_2} steps.
 *
 * The model is vector valued: (phi L, L), with phi the space integral of the
 * path at the horizon and L the likelihood of the observations. Their ratio
 * of expectations is the smoothing expectation of phi.
 */
class SpdeModel final : public Model {
 public:
  explicit SpdeModel(SpdeConfig config = {});

  std::size_t dimension() const override { return 2; }
  std::size_t width() const override { return 2; }
  bool admissible(const MultiIndex& alpha) const override;
  std::unique_ptr<Realization> realize(RandomStream& rng,
                                       const MultiIndex& finest) const override;

  const SpdeConfig& config() const { return config_; }
  void set_observations(SpdeObservations data);
  const SpdeObservations& observations() const { return data_; }

  static int modes_at(int level) { return 2 << level; }
  std::vector<double> observation_times() const;
  std::vector<double> observation_locations() const;

  BrownianDriver make_driver(const MultiIndex& finest, RandomStream& rng) const;
  SpectralPath exponential_euler_path(const MultiIndex& alpha, const BrownianDriver& driver) const;
  /// u(x, t_k) for observation time k.
  double field_at(const SpectralPath& path, int k, double x) const;
  double log_likelihood(const SpectralPath& path) const;
  double likelihood(const SpectralPath& path) const;
  double path_integral_functional(const SpectralPath& path) const;
  /// (phi L, L) at alpha.
  void smoothing_values(const MultiIndex& alpha, const BrownianDriver& driver,
                        std::span<double> out) const;

  /// Simulates the hidden path at the master index and perturbs it with
  /// N(0, obs_sigma^2) noise. Does not install the data.
  SpdeObservations generate_truth_and_data(RandomStream& rng) const;

 private:
  SpdeConfig config_;
  SpdeObservations data_;
};

/// Numerator over denominator; throws std::domain_error if the denominator is <= 0.
double smoothing_ratio(std::span<const double> estimate);

/// Delta-method scalarization (1, -R) of (numerator, denominator) increments.
std::vector<double> smoothing_weights(std::span<const double> estimate);

}  // namespace umimc
