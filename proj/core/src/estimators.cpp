// SPDX-License-Identifier: Apache-2.0
#include "umimc/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "umimc/level_optimizer.hpp"

namespace umimc {

bool is_diagonal(EstimatorKind kind) {
  return kind == EstimatorKind::DiagonalCoupled || kind == EstimatorKind::DiagonalIndependent;
}

bool is_coupled(EstimatorKind kind) {
  return kind == EstimatorKind::CoupledSum || kind == EstimatorKind::DiagonalCoupled;
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::CoupledSum: return "coupled_sum";
    case EstimatorKind::DiagonalCoupled: return "diagonal_coupled";
    case EstimatorKind::IndependentSum: return "independent_sum";
    case EstimatorKind::DiagonalIndependent: return "diagonal_independent";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  for (auto k : {EstimatorKind::CoupledSum, EstimatorKind::DiagonalCoupled,
                 EstimatorKind::IndependentSum, EstimatorKind::DiagonalIndependent}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown estimator kind '" + std::string(name) + "'");
}

double for_each_increment(const Model& model, const MultiIndex& upper, RandomStream& rng,
                          bool coupled, const IncrementVisitor& visit) {
  if (upper.dim() != model.dimension()) throw std::invalid_argument("model dimension mismatch");
  const IndexBox box(upper);
  std::vector<double> inc(model.width());
  if (coupled) {
    CoupledFamily family(model, model.realize(rng, upper));
    for (std::size_t k = 0; k < box.size(); ++k) {
      const MultiIndex alpha = box.at(k);
      if (!model.admissible(alpha)) continue;
      const double before = family.cost();
      family.increment(alpha, inc);
      visit(alpha, inc, family.cost() - before);
    }
    return family.cost();
  }
  double total = 0.0;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const MultiIndex alpha = box.at(k);
    if (!model.admissible(alpha)) continue;
    CoupledFamily family(model, model.realize(rng, alpha));
    family.increment(alpha, inc);
    total += family.cost();
    visit(alpha, inc, family.cost());
  }
  return total;
}

namespace {

Draw weighted_draw(const Model& model, const TailDistribution& tail, RandomStream& rng,
                   bool coupled, bool diagonal) {
  if (tail.dim() != model.dimension()) throw std::invalid_argument("tail/model dimension mismatch");
  if (diagonal && !tail.diagonal()) {
    throw std::invalid_argument("diagonal estimators need a diagonal tail distribution");
  }
  Draw out{tail.sample(rng), std::vector<double>(model.width(), 0.0), 0.0, false};
  bool any = false;
  out.cost = for_each_increment(
      model, out.n, rng, coupled,
      [&](const MultiIndex& alpha, std::span<const double> inc, double) {
        const double weight = diagonal ? tail.shell_prob(alpha.sup()) : tail.tail_prob(alpha);
        for (std::size_t c = 0; c < inc.size(); ++c) out.value[c] += inc[c] / weight;
        any = true;
      });
  if (!any) {
    out.degenerate = true;
    out.cost = 0.0;
  }
  return out;
}

}  // namespace

Draw draw_coupled(const Model& model, const TailDistribution& tail, RandomStream& rng) {
  return weighted_draw(model, tail, rng, true, false);
}

Draw draw_diagonal_coupled(const Model& model, const TailDistribution& tail, RandomStream& rng) {
  return weighted_draw(model, tail, rng, true, true);
}

Draw draw_independent(const Model& model, const TailDistribution& tail, RandomStream& rng) {
  return weighted_draw(model, tail, rng, false, false);
}

Draw draw_diagonal_independent(const Model& model, const TailDistribution& tail,
                               RandomStream& rng) {
  return weighted_draw(model, tail, rng, false, true);
}

Draw draw(EstimatorKind kind, const Model& model, const TailDistribution& tail,
          RandomStream& rng) {
  return weighted_draw(model, tail, rng, is_coupled(kind), is_diagonal(kind));
}

// ---------------------------------------------------------------------------

RunningEstimate::RunningEstimate(std::size_t dim, std::size_t width, int cap)
    : box_(MultiIndex::constant(dim, cap)), width_(width), cap_(cap) {
  if (width_ == 0) throw std::invalid_argument("estimate width must be >= 1");
  sums_.assign(box_.size() * width_, 0.0);
  cross_.assign(box_.size() * width_ * width_, 0.0);
  cost_sums_.assign(box_.size(), 0.0);
  samples_.assign(box_.size(), 0);
  shell_hits_.assign(static_cast<std::size_t>(cap) + 1, 0);
}

void RunningEstimate::begin_iteration(int level) {
  level = std::clamp(level, 0, cap_);
  for (int k = 0; k <= level; ++k) ++shell_hits_[static_cast<std::size_t>(k)];
  ++iterations_;
}

void RunningEstimate::add_increment(const MultiIndex& alpha, std::span<const double> increment,
                                    double cost) {
  if (increment.size() != width_) throw std::invalid_argument("increment width mismatch");
  const std::size_t o = box_.offset(alpha);
  for (std::size_t c = 0; c < width_; ++c) {
    sums_[o * width_ + c] += increment[c];
    for (std::size_t e = 0; e < width_; ++e) {
      cross_[(o * width_ + c) * width_ + e] += increment[c] * increment[e];
    }
  }
  cost_sums_[o] += cost;
  ++samples_[o];
  cost_ += cost;
}

std::uint64_t RunningEstimate::hits(const MultiIndex& alpha) const {
  return shell_hits_.at(static_cast<std::size_t>(alpha.sup()));
}

std::uint64_t RunningEstimate::samples(const MultiIndex& alpha) const {
  return samples_[box_.offset(alpha)];
}

std::vector<double> RunningEstimate::estimate() const {
  std::vector<double> out(width_, 0.0);
  for (std::size_t o = 0; o < box_.size(); ++o) {
    if (samples_[o] == 0) continue;
    const auto c = static_cast<double>(hits(box_.at(o)));
    for (std::size_t k = 0; k < width_; ++k) out[k] += sums_[o * width_ + k] / c;
  }
  return out;
}

std::vector<double> RunningEstimate::mean_increment(const MultiIndex& alpha) const {
  const std::size_t o = box_.offset(alpha);
  std::vector<double> out(width_, 0.0);
  if (samples_[o] == 0) return out;
  for (std::size_t k = 0; k < width_; ++k) {
    out[k] = sums_[o * width_ + k] / static_cast<double>(samples_[o]);
  }
  return out;
}

std::vector<double> RunningEstimate::increment_cross_moment(const MultiIndex& alpha) const {
  const std::size_t o = box_.offset(alpha);
  std::vector<double> out(width_ * width_, 0.0);
  if (samples_[o] == 0) return out;
  for (std::size_t k = 0; k < width_ * width_; ++k) {
    out[k] = cross_[o * width_ * width_ + k] / static_cast<double>(samples_[o]);
  }
  return out;
}

double RunningEstimate::mean_cost(const MultiIndex& alpha) const {
  const std::size_t o = box_.offset(alpha);
  return samples_[o] ? cost_sums_[o] / static_cast<double>(samples_[o]) : 0.0;
}

void RunningEstimate::merge(const RunningEstimate& other) {
  if (other.box_.upper() != box_.upper() || other.width_ != width_) {
    throw std::invalid_argument("cannot merge estimates over different boxes");
  }
  for (std::size_t k = 0; k < sums_.size(); ++k) sums_[k] += other.sums_[k];
  for (std::size_t k = 0; k < cross_.size(); ++k) cross_[k] += other.cross_[k];
  for (std::size_t k = 0; k < cost_sums_.size(); ++k) cost_sums_[k] += other.cost_sums_[k];
  for (std::size_t k = 0; k < samples_.size(); ++k) samples_[k] += other.samples_[k];
  for (std::size_t k = 0; k < shell_hits_.size(); ++k) shell_hits_[k] += other.shell_hits_[k];
  iterations_ += other.iterations_;
  cost_ += other.cost_;
}

// ---------------------------------------------------------------------------

std::optional<TailDistribution> optimal_tail_refresh(const RunningEstimate& state,
                                                     std::span<const double> weights,
                                                     std::size_t* floored) {
  const IndexBox& box = state.box();
  const std::size_t w = state.width();
  std::vector<double> wt(w, 0.0);
  if (weights.empty()) {
    wt[0] = 1.0;
  } else {
    if (weights.size() != w) throw std::invalid_argument("moment weights width mismatch");
    std::copy(weights.begin(), weights.end(), wt.begin());
  }
  auto dot = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t c = 0; c < w; ++c) s += wt[c] * v[c];
    return s;
  };
  auto quad = [&](const std::vector<double>& m) {
    double s = 0.0;
    for (std::size_t c = 0; c < w; ++c)
      for (std::size_t e = 0; e < w; ++e) s += wt[c] * m[c * w + e] * wt[e];
    return s;
  };

  const int cap = state.cap();
  std::vector<double> mean(box.size()), var(box.size()), cost(box.size());
  std::vector<double> level_mean(static_cast<std::size_t>(cap) + 1, 0.0);
  for (std::size_t o = 0; o < box.size(); ++o) {
    const MultiIndex a = box.at(o);
    if (state.samples(a) == 0) continue;
    mean[o] = dot(state.mean_increment(a));
    var[o] = std::max(0.0, quad(state.increment_cross_moment(a)) - mean[o] * mean[o]);
    cost[o] = state.mean_cost(a);
    level_mean[static_cast<std::size_t>(a.sup())] += mean[o];
  }
  // E S_k by telescoping over shells, with E S_{-1} = 0; E S proxied by E S_cap.
  std::vector<double> es(level_mean.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < level_mean.size(); ++k) es[k] = (acc += level_mean[k]);
  const double limit = es.back();

  std::vector<double> mu(box.size(), 0.0);
  for (std::size_t o = 0; o < box.size(); ++o) {
    const MultiIndex a = box.at(o);
    if (state.samples(a) == 0) continue;
    const auto k = static_cast<std::size_t>(a.sup());
    const double prev = k == 0 ? 0.0 : es[k - 1];
    mu[o] = var[o] + mean[o] * ((limit - prev) + (limit - es[k]));
  }
  mu[0] -= limit * limit;
  const std::size_t changed = floor_negative(mu);
  if (floored) *floored = changed;

  std::vector<double> mu_levels = shell_sums(box, mu);
  std::vector<double> cost_levels = shell_sums(box, cost);
  double top = *std::max_element(mu_levels.begin(), mu_levels.end());
  if (!(top > 0.0)) return std::nullopt;
  for (std::size_t k = 0; k < mu_levels.size(); ++k) {
    if (!(mu_levels[k] > 0.0)) mu_levels[k] = 1e-12 * top;
    if (!(cost_levels[k] > 0.0)) return std::nullopt;
  }
  const OptimalSequence opt = optimal_sequence(mu_levels, cost_levels);
  return from_optimal_sequence(box.dim(), opt.shells, opt.values, cap);
}

AdaptiveRun run_adaptive(const Model& model, const AdaptiveOptions& options, RandomStream& rng) {
  if (!(options.budget > 0.0)) throw std::invalid_argument("budget must be positive");
  if (options.cap < 0) throw std::invalid_argument("cap must be >= 0");
  if (!is_diagonal(options.kind)) {
    throw std::invalid_argument("the count-normalized estimator needs a diagonal estimator kind");
  }
  if (!options.initial_tail) throw std::invalid_argument("an initial tail distribution is required");
  if (!options.initial_tail->diagonal() || options.initial_tail->dim() != model.dimension()) {
    throw std::invalid_argument("initial tail must be diagonal with the model dimension");
  }
  const std::size_t d = model.dimension();
  const MultiIndex origin = MultiIndex::zeros(d);
  if (options.budget < model.cost(model.canonical(origin))) {
    throw std::invalid_argument("budget is too small to complete one iteration");
  }

  const bool coupled = is_coupled(options.kind);
  AdaptiveRun run{RunningEstimate(d, model.width(), options.cap), {},
                  options.initial_tail->truncated(options.cap), 0, 0};
  RunningEstimate& state = run.state;

  const auto started = std::chrono::steady_clock::now();
  bool armed = false;
  std::uint64_t next_refresh = 0;
  auto refresh = [&]() {
    std::optional<TailDistribution> next;
    if (options.refresh) {
      next = options.refresh(state);
    } else {
      std::vector<double> w;
      if (options.weights) w = options.weights(state.estimate());
      std::size_t floored = 0;
      next = optimal_tail_refresh(state, w, &floored);
      run.floored_entries += floored;
    }
    if (next) {
      run.final_tail = next->truncated(options.cap);
      ++run.refreshes;
    }
    const std::uint64_t m = state.iterations();
    const std::uint64_t step = std::max<std::uint64_t>(
        1, (m + options.refresh_divisor - 1) / std::max<std::uint64_t>(1, options.refresh_divisor));
    next_refresh = m + step;
  };

  while (state.cost() < options.budget) {
    const int level = run.final_tail.sample(rng).sup();
    state.begin_iteration(level);
    const double spent = for_each_increment(
        model, MultiIndex::constant(d, level), rng, coupled,
        [&](const MultiIndex& alpha, std::span<const double> inc, double cost) {
          state.add_increment(alpha, inc, cost);
        });
    if (!(spent > 0.0)) throw std::runtime_error("iteration consumed no work; check the model cost");
    if (options.record_trajectory) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
      run.trajectory.push_back({state.iterations(), state.cost(), state.estimate(), elapsed.count()});
    }
    if (!options.adapt) continue;
    if (!armed) {
      bool ready = true;
      for (int k = 0; k <= options.cap; ++k) ready = ready && state.shell_hits(k) >= options.min_shell_hits;
      if (ready) {
        armed = true;
        refresh();
      }
    } else if (state.iterations() >= next_refresh) {
      refresh();
    }
  }
  return run;
}

}  // namespace umimc
