// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <unordered_map>
#include <vector>

#include "umimc/lattice.hpp"
#include "umimc/level_optimizer.hpp"
#include "umimc/random_stream.hpp"

namespace umimc::testing {

/// Running mean / variance (Welford).
class Moments {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr_of_mean() const { return std::sqrt(variance() / static_cast<double>(n_)); }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// A table of values indexed by multi-indices, filled with uniform(-1, 1) draws.
struct RandomTable {
  std::unordered_map<MultiIndex, double, MultiIndexHash> values;

  RandomTable(const IndexBox& box, RandomStream& rng) {
    for (const auto& a : box.enumerate()) values[a] = rng.uniform(-1.0, 1.0);
  }
  double operator()(const MultiIndex& a) const { return values.at(a); }
};

/// Mixed difference by explicit enumeration of r in {0,1}^d, independent of
/// signed_corners: applies the boundary rule Delta_i = identity at alpha_i = 0.
inline double brute_mixed_difference(const MultiIndex& alpha,
                                     const std::function<double(const MultiIndex&)>& s) {
  const std::size_t d = alpha.dim();
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    std::vector<int> c(alpha.components().begin(), alpha.components().end());
    int sign = 1;
    bool valid = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask & (1u << i)) {
        if (c[i] == 0) {
          valid = false;
          break;
        }
        --c[i];
        sign = -sign;
      }
    }
    if (valid) total += sign * s(MultiIndex(c));
  }
  return total;
}

/// All indices of I_0^n for a d-dimensional box, without going through IndexBox.
inline std::vector<MultiIndex> all_indices(std::size_t d, int n) {
  std::vector<MultiIndex> out;
  std::vector<int> c(d, 0);
  while (true) {
    out.emplace_back(c);
    std::size_t i = 0;
    while (i < d && c[i] == n) c[i++] = 0;
    if (i == d) break;
    ++c[i];
  }
  return out;
}

/// Minimum of g' over every partition of the levels into consecutive shells,
/// each shell taking its closed-form value; infeasible partitions are skipped.
inline double brute_force_partitions(const std::vector<double>& mu, const std::vector<double>& t) {
  const std::size_t n = mu.size();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> starts{0};
    for (std::size_t k = 1; k < n; ++k)
      if (mask & (1u << (k - 1))) starts.push_back(static_cast<int>(k));
    const auto agg = aggregate_shells(mu, t, starts);
    std::vector<double> f(n);
    bool feasible = true;
    double prev = 1.0;
    for (std::size_t j = 0; j < starts.size(); ++j) {
      const double v = std::sqrt((agg.mu[j] / agg.cost[j]) / (agg.mu[0] / agg.cost[0]));
      if (v > prev) feasible = false;
      prev = v;
      const std::size_t hi = j + 1 < starts.size() ? static_cast<std::size_t>(starts[j + 1]) : n;
      for (std::size_t k = static_cast<std::size_t>(starts[j]); k < hi; ++k) f[k] = v;
    }
    if (!feasible) continue;
    f[0] = 1.0;
    best = std::min(best, objective_from_mu(f, mu, t));
  }
  return best;
}

}  // namespace umimc::testing
