// SPDX-License-Identifier: Apache-2.0
#include "umimc/spde_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace umimc {

void SpdeConfig::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (mode_variance < 0.0) throw std::invalid_argument("mode variance must be >= 0");
  if (!(obs_sigma > 0.0)) throw std::invalid_argument("observation sigma must be positive");
  if (!(inflation > 0.0)) throw std::invalid_argument("inflation must be positive");
  if (obs_times < 0 || obs_locations < 1) throw std::invalid_argument("bad observation layout");
  if (alpha_max.dim() != 2) throw std::invalid_argument("alpha_max must be two-dimensional");
  if (master_offset < 0) throw std::invalid_argument("master offset must be >= 0");
  if (full_linear && reaction >= std::numbers::pi * std::numbers::pi) {
    throw std::invalid_argument("reaction exceeds the first eigenvalue");
  }
}

MultiIndex SpdeConfig::master() const {
  return MultiIndex{alpha_max[0] + master_offset, alpha_max[1] + master_offset};
}

BrownianDriver::BrownianDriver(int modes, int time_level, double horizon, RandomStream& rng)
    : modes_(modes), time_level_(time_level), levels_(static_cast<std::size_t>(time_level) + 1) {
  if (modes < 1 || time_level < 0) throw std::invalid_argument("bad driver resolution");
  const std::size_t steps = std::size_t{1} << time_level;
  const double scale = std::sqrt(horizon / static_cast<double>(steps));
  auto& fine = levels_.back();
  fine.resize(static_cast<std::size_t>(modes) * steps);
  for (double& z : fine) z = scale * rng.normal();
}

std::span<const double> BrownianDriver::increments(int mode, int level) const {
  if (mode < 0 || mode >= modes_) throw std::out_of_range("driver mode out of range");
  if (level < 0 || level > time_level_) throw std::out_of_range("driver level out of range");
  for (int l = time_level_ - 1; l >= level; --l) {
    auto& coarse = levels_[static_cast<std::size_t>(l)];
    if (!coarse.empty()) continue;
    const auto& fine = levels_[static_cast<std::size_t>(l) + 1];
    coarse.resize(fine.size() / 2);
    for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = fine[2 * i] + fine[2 * i + 1];
  }
  const std::size_t steps = std::size_t{1} << level;
  return std::span<const double>(levels_[static_cast<std::size_t>(level)])
      .subspan(static_cast<std::size_t>(mode) * steps, steps);
}

double gaussian_log_likelihood(std::span<const double> y, std::span<const double> x,
                               double sigma) {
  if (y.size() != x.size()) throw std::invalid_argument("observation size mismatch");
  const double log_norm = std::log(std::sqrt(2.0 * std::numbers::pi) * sigma);
  double s = 0.0;
  for (std::size_t l = 0; l < y.size(); ++l) {
    const double r = (y[l] - x[l]) / sigma;
    s += -0.5 * r * r - log_norm;
  }
  return s;
}

namespace {

class SpdeRealization final : public Realization {
 public:
  SpdeRealization(const SpdeModel& model, BrownianDriver driver)
      : model_(model), driver_(std::move(driver)) {}

  void evaluate(const MultiIndex& beta, std::span<double> out) override {
    model_.smoothing_values(beta, driver_, out);
  }

 private:
  const SpdeModel& model_;
  BrownianDriver driver_;
};

}  // namespace

SpdeModel::SpdeModel(SpdeConfig config) : config_(std::move(config)) {
  config_.validate();
  data_.times = config_.obs_times;
  data_.locations = config_.obs_locations;
  data_.values.assign(static_cast<std::size_t>(data_.times) * data_.locations, 0.0);
}

bool SpdeModel::admissible(const MultiIndex& alpha) const { return alpha.dim() == 2; }

void SpdeModel::set_observations(SpdeObservations data) {
  if (data.times != config_.obs_times || data.locations != config_.obs_locations ||
      data.values.size() != static_cast<std::size_t>(data.times) * data.locations) {
    throw std::invalid_argument("observation layout does not match the configuration");
  }
  data_ = std::move(data);
}

std::vector<double> SpdeModel::observation_times() const {
  std::vector<double> t(static_cast<std::size_t>(config_.obs_times));
  for (int k = 1; k <= config_.obs_times; ++k) {
    t[static_cast<std::size_t>(k - 1)] = config_.horizon * k / config_.obs_times;
  }
  return t;
}

std::vector<double> SpdeModel::observation_locations() const {
  std::vector<double> o(static_cast<std::size_t>(config_.obs_locations));
  for (int l = 1; l <= config_.obs_locations; ++l) {
    o[static_cast<std::size_t>(l - 1)] = static_cast<double>(l) / (config_.obs_locations + 1);
  }
  return o;
}

BrownianDriver SpdeModel::make_driver(const MultiIndex& finest, RandomStream& rng) const {
  return BrownianDriver(modes_at(finest[0]), finest[1], config_.horizon, rng);
}

std::unique_ptr<Realization> SpdeModel::realize(RandomStream& rng,
                                                const MultiIndex& finest) const {
  return std::make_unique<SpdeRealization>(*this, make_driver(finest, rng));
}

SpectralPath SpdeModel::exponential_euler_path(const MultiIndex& alpha,
                                               const BrownianDriver& driver) const {
  if (alpha.dim() != 2) throw std::invalid_argument("SPDE indices are two-dimensional");
  SpectralPath path;
  path.alpha = alpha;
  path.modes = modes_at(alpha[0]);
  path.steps = 1 << alpha[1];
  if (path.modes > driver.modes() || alpha[1] > driver.time_level()) {
    throw std::invalid_argument("index " + alpha.str() + " exceeds the driver resolution");
  }
  const double h = config_.horizon / path.steps;
  const double sq = std::sqrt(config_.mode_variance);
  const double r = config_.reaction;
  const auto times = observation_times();
  const std::size_t kobs = times.size();
  path.observed.assign(kobs * static_cast<std::size_t>(path.modes), 0.0);
  path.final.assign(static_cast<std::size_t>(path.modes), 0.0);

  for (int n = 1; n <= path.modes; ++n) {
    const double eig = n * n * std::numbers::pi * std::numbers::pi;
    const double rate = config_.full_linear ? eig - r : eig;
    const double decay = std::exp(-rate * h);
    // phi_1(-rate h) h: integral of the semigroup over one step.
    const double drift = config_.full_linear ? 0.0 : -std::expm1(-rate * h) / rate * r;
    const double noise =
        config_.exact_variance
            ? sq * std::sqrt(-std::expm1(-2.0 * rate * h) / (2.0 * rate * h))
            : sq * decay;
    const auto db = driver.increments(n - 1, alpha[1]);
    double c = 1.0 / n;
    std::size_t next_obs = 0;
    for (int j = 0; j < path.steps; ++j) {
      const double prev = c;
      c = decay * c + drift * c + noise * db[static_cast<std::size_t>(j)];
      const double t1 = (j + 1) * h;
      while (next_obs < kobs && times[next_obs] <= t1 + 1e-12 * h) {
        const double w = std::clamp((times[next_obs] - j * h) / h, 0.0, 1.0);
        path.observed[next_obs * static_cast<std::size_t>(path.modes) + static_cast<std::size_t>(n - 1)] =
            (1.0 - w) * prev + w * c;
        ++next_obs;
      }
    }
    path.final[static_cast<std::size_t>(n - 1)] = c;
  }
  return path;
}

double SpdeModel::field_at(const SpectralPath& path, int k, double x) const {
  const double* c = path.observed.data() + static_cast<std::size_t>(k) * path.modes;
  double u = 0.0;
  for (int n = 1; n <= path.modes; ++n) u += c[n - 1] * std::sin(n * std::numbers::pi * x);
  return std::numbers::sqrt2 * u;
}

double SpdeModel::log_likelihood(const SpectralPath& path) const {
  const auto locs = observation_locations();
  std::vector<double> x(locs.size());
  double s = 0.0;
  for (int k = 0; k < config_.obs_times; ++k) {
    for (std::size_t l = 0; l < locs.size(); ++l) x[l] = field_at(path, k, locs[l]);
    const auto y = std::span<const double>(data_.values)
                       .subspan(static_cast<std::size_t>(k) * locs.size(), locs.size());
    s += gaussian_log_likelihood(y, x, config_.inference_sigma());
  }
  return s;
}

double SpdeModel::likelihood(const SpectralPath& path) const {
  return std::exp(log_likelihood(path));
}

double SpdeModel::path_integral_functional(const SpectralPath& path) const {
  double s = 0.0;
  for (int n = 1; n <= path.modes; n += 2) {
    // 1 - cos(n pi) = 2 for odd n and 0 for even n.
    s += path.final[static_cast<std::size_t>(n - 1)] * 2.0 / (n * std::numbers::pi);
  }
  return std::numbers::sqrt2 * s;
}

void SpdeModel::smoothing_values(const MultiIndex& alpha, const BrownianDriver& driver,
                                 std::span<double> out) const {
  const SpectralPath path = exponential_euler_path(alpha, driver);
  const double l = likelihood(path);
  out[0] = path_integral_functional(path) * l;
  out[1] = l;
}

SpdeObservations SpdeModel::generate_truth_and_data(RandomStream& rng) const {
  SpdeObservations data;
  data.seed = rng.key();
  data.times = config_.obs_times;
  data.locations = config_.obs_locations;
  RandomStream path_rng = rng.split(0);
  RandomStream noise_rng = rng.split(1);
  const MultiIndex master = config_.master();
  const BrownianDriver driver = make_driver(master, path_rng);
  const SpectralPath path = exponential_euler_path(master, driver);
  const auto locs = observation_locations();
  for (int k = 0; k < data.times; ++k) {
    for (double x : locs) data.values.push_back(field_at(path, k, x) + config_.obs_sigma * noise_rng.normal());
  }
  data.truth_integral = path_integral_functional(path);
  return data;
}

double smoothing_ratio(std::span<const double> estimate) {
  if (estimate.size() != 2) throw std::invalid_argument("expected (numerator, denominator)");
  if (!(estimate[1] > 0.0)) throw std::domain_error("non-positive likelihood estimate");
  return estimate[0] / estimate[1];
}

std::vector<double> smoothing_weights(std::span<const double> estimate) {
  if (estimate.size() == 2 && estimate[1] > 0.0) return {1.0, -estimate[0] / estimate[1]};
  return {1.0, 0.0};
}

}  // namespace umimc
