// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "umimc/lattice.hpp"
#include "umimc/random_stream.hpp"

namespace umimc {

/*!
 * Law of the randomized truncation index N, described by its survival
 * function F(alpha) = P(N >= alpha).
 *
 * Three families are supported:
 *  - product geometric: independent components with P(N_i >= k) = rho_i^k;
 *  - diagonal geometric: N = (n, ..., n) with P(n >= k) = rho^k;
 *  - diagonal empirical: piecewise-constant survival on sup-norm shells,
 *    F = values[j] for shells[j] <= |alpha|_inf < shells[j+1], zero past cap.
 *
 * Any family can be truncated at a cap m. The truncated law is that of
 * min(N, m) componentwise, so tail probabilities are unchanged up to the cap
 * and zero beyond it; sampling and tail_prob stay consistent.
 */
class TailDistribution {
 public:
  enum class Kind { ProductGeometric, DiagonalGeometric, DiagonalEmpirical };

  static TailDistribution product_geometric(std::vector<double> ratios);
  static TailDistribution diagonal_geometric(std::size_t dim, double ratio);
  static TailDistribution diagonal_empirical(std::size_t dim, std::vector<int> shells,
                                             std::vector<double> values, int cap);

  /// Same family truncated at `cap` (the tighter cap wins if already truncated).
  TailDistribution truncated(int cap) const;

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool diagonal() const { return kind_ != Kind::ProductGeometric; }
  std::optional<int> cap() const { return cap_; }

  const std::vector<double>& ratios() const { return ratios_; }
  const std::vector<int>& shells() const { return shells_; }
  const std::vector<double>& shell_values() const { return values_; }

  /// P(N >= alpha).
  double tail_prob(const MultiIndex& alpha) const;
  /// P(n >= k) for the scalar level of a diagonal law.
  double shell_prob(int k) const;

  /// P(min(N, n) = nu), by inclusion-exclusion on the survival function.
  double truncated_mass(const MultiIndex& nu, int n) const;

  MultiIndex sample(RandomStream& rng) const;

  std::string describe() const;

 private:
  TailDistribution() = default;
  double base_survival(int axis, int k) const;

  Kind kind_ = Kind::DiagonalGeometric;
  std::size_t dim_ = 1;
  std::vector<double> ratios_;
  std::vector<int> shells_;
  std::vector<double> values_;
  std::optional<int> cap_;
};

/// Diagonal empirical law from an optimizer output (shell starts and F values).
/// Throws if values are not strictly decreasing or do not start at 1.
TailDistribution from_optimal_sequence(std::size_t dim, const std::vector<int>& shells,
                                       const std::vector<double>& values, int cap);

}  // namespace umimc
