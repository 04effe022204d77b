// SPDX-License-Identifier: Apache-2.0
#include "umimc/level_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace umimc {

std::vector<double> shell_sums(const IndexBox& box, std::span<const double> per_index) {
  if (per_index.size() != box.size()) throw std::invalid_argument("table does not cover the box");
  std::vector<double> out(static_cast<std::size_t>(box.upper().sup()) + 1, 0.0);
  for (std::size_t o = 0; o < box.size(); ++o) {
    out[static_cast<std::size_t>(box.at(o).sup())] += per_index[o];
  }
  return out;
}

ShellAggregate aggregate_shells(std::span<const double> mu_levels,
                                std::span<const double> cost_levels,
                                const std::vector<int>& shells) {
  if (mu_levels.size() != cost_levels.size()) throw std::invalid_argument("level table size mismatch");
  if (shells.empty() || shells.front() != 0) throw std::invalid_argument("shells must start at 0");
  ShellAggregate agg{shells, std::vector<double>(shells.size(), 0.0),
                     std::vector<double>(shells.size(), 0.0)};
  for (std::size_t j = 0; j < shells.size(); ++j) {
    const auto lo = static_cast<std::size_t>(shells[j]);
    const auto hi = j + 1 < shells.size() ? static_cast<std::size_t>(shells[j + 1]) : mu_levels.size();
    if (lo >= hi || hi > mu_levels.size()) throw std::invalid_argument("invalid shell boundaries");
    for (std::size_t k = lo; k < hi; ++k) {
      agg.mu[j] += mu_levels[k];
      agg.cost[j] += cost_levels[k];
    }
  }
  return agg;
}

namespace {

void check_feasible(std::span<const double> f, std::size_t levels) {
  if (f.size() != levels) throw std::invalid_argument("one tail value per level is required");
  if (f.empty() || f[0] != 1.0) throw std::invalid_argument("infeasible tail: F_0 must equal 1");
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!(f[k] > 0.0)) throw std::invalid_argument("infeasible tail: values must be positive");
    if (k && f[k] > f[k - 1]) throw std::invalid_argument("infeasible tail: values must not increase");
  }
}

}  // namespace

double objective_g_prime(std::span<const double> tail_values, std::span<const double> nu_levels,
                         std::span<const double> cost_levels, double mean) {
  check_feasible(tail_values, nu_levels.size());
  if (cost_levels.size() != nu_levels.size()) throw std::invalid_argument("level table size mismatch");
  double second = -mean * mean;
  double work = 0.0;
  for (std::size_t k = 0; k < nu_levels.size(); ++k) {
    second += nu_levels[k] / tail_values[k];
    work += cost_levels[k] * tail_values[k];
  }
  return second * work;
}

double objective_from_mu(std::span<const double> tail_values, std::span<const double> mu_levels,
                         std::span<const double> cost_levels) {
  return objective_g_prime(tail_values, mu_levels, cost_levels, 0.0);
}

std::vector<double> unconstrained_optimum(std::span<const double> mu, std::span<const double> t) {
  if (mu.empty() || mu.size() != t.size()) throw std::invalid_argument("mu/t size mismatch");
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (mu[k] < 0.0) {
      throw std::domain_error("negative mu' entry at position " + std::to_string(k));
    }
    if (!(t[k] > 0.0)) throw std::domain_error("non-positive cost at position " + std::to_string(k));
  }
  if (!(mu[0] > 0.0)) throw std::domain_error("mu'_0 must be positive");
  const double base = std::sqrt(mu[0] / t[0]);
  std::vector<double> out(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) out[k] = std::sqrt(mu[k] / t[k]) / base;
  out[0] = 1.0;
  return out;
}

std::vector<double> unconstrained_optimum(const IndexBox& box, std::span<const double> mu,
                                          std::span<const double> t) {
  if (mu.size() != box.size()) throw std::invalid_argument("mu table does not cover the box");
  for (std::size_t o = 0; o < box.size(); ++o) {
    if (mu[o] < 0.0) throw std::domain_error("negative mu' entry at index " + box.at(o).str());
  }
  return unconstrained_optimum(mu, t);
}

std::vector<double> OptimalSequence::level_values() const {
  std::vector<double> out(static_cast<std::size_t>(cap) + 1);
  for (std::size_t j = 0; j < shells.size(); ++j) {
    const auto lo = static_cast<std::size_t>(shells[j]);
    const auto hi = j + 1 < shells.size() ? static_cast<std::size_t>(shells[j + 1]) : out.size();
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(lo),
              out.begin() + static_cast<std::ptrdiff_t>(hi), values[j]);
  }
  return out;
}

OptimalSequence optimal_sequence(std::span<const double> mu_levels,
                                 std::span<const double> cost_levels) {
  if (mu_levels.empty()) throw std::invalid_argument("empty moment table");
  if (mu_levels.size() != cost_levels.size()) throw std::invalid_argument("level table size mismatch");
  for (std::size_t k = 0; k < mu_levels.size(); ++k) {
    if (!(mu_levels[k] > 0.0)) {
      throw std::domain_error("mu' must be positive on every level (level " + std::to_string(k) + ")");
    }
    if (!(cost_levels[k] > 0.0)) {
      throw std::domain_error("cost must be positive on every level (level " + std::to_string(k) + ")");
    }
  }

  // Pool adjacent violators on the ratios mu/t: a block whose ratio does not
  // fall strictly below its predecessor's is merged into it.
  struct Block {
    int start;
    double mu;
    double cost;
    double ratio() const { return mu / cost; }
  };
  std::vector<Block> blocks;
  for (std::size_t k = 0; k < mu_levels.size(); ++k) {
    blocks.push_back({static_cast<int>(k), mu_levels[k], cost_levels[k]});
    while (blocks.size() >= 2 && blocks.back().ratio() >= blocks[blocks.size() - 2].ratio()) {
      Block top = blocks.back();
      blocks.pop_back();
      blocks.back().mu += top.mu;
      blocks.back().cost += top.cost;
    }
  }

  // Guard against ratios that differ only below the rounding of sqrt.
  const auto value_of = [&](const Block& b) {
    return std::sqrt(b.ratio()) / std::sqrt(blocks.front().ratio());
  };
  for (std::size_t j = 1; j < blocks.size();) {
    if (value_of(blocks[j]) >= value_of(blocks[j - 1])) {
      blocks[j - 1].mu += blocks[j].mu;
      blocks[j - 1].cost += blocks[j].cost;
      blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(j));
      j = 1;
    } else {
      ++j;
    }
  }

  OptimalSequence out;
  out.cap = static_cast<int>(mu_levels.size()) - 1;
  const double base = std::sqrt(blocks.front().ratio());
  double root_sum = 0.0;
  for (const Block& b : blocks) {
    out.shells.push_back(b.start);
    out.values.push_back(std::sqrt(b.ratio()) / base);
    out.shell_mu.push_back(b.mu);
    out.shell_cost.push_back(b.cost);
    root_sum += std::sqrt(b.mu * b.cost);
  }
  out.values.front() = 1.0;
  out.objective = root_sum * root_sum;
  return out;
}

OptimalSequence optimal_sequence(const IndexBox& box, std::span<const double> mu,
                                 std::span<const double> t) {
  for (std::size_t o = 0; o < box.size(); ++o) {
    if (o < mu.size() && mu[o] < 0.0) {
      throw std::domain_error("negative mu' entry at index " + box.at(o).str());
    }
  }
  const auto mu_levels = shell_sums(box, mu);
  const auto cost_levels = shell_sums(box, t);
  return optimal_sequence(mu_levels, cost_levels);
}

std::size_t floor_negative(std::vector<double>& values, double relative_floor) {
  if (values.empty()) return 0;
  const double top = *std::max_element(values.begin(), values.end());
  const double floor = top > 0.0 ? relative_floor * top : 0.0;
  std::size_t changed = 0;
  for (double& v : values) {
    if (v < 0.0) {
      v = floor;
      ++changed;
    }
  }
  return changed;
}

}  // namespace umimc
