// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace umimc {

/// Point of the lattice N_0^d with the componentwise partial order.
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> components);
  explicit MultiIndex(std::vector<int> components);

  static MultiIndex zeros(std::size_t dim);
  static MultiIndex constant(std::size_t dim, int value);
  static MultiIndex unit(std::size_t dim, std::size_t axis);

  std::size_t dim() const { return c_.size(); }
  int operator[](std::size_t i) const { return c_[i]; }
  std::span<const int> components() const { return c_; }

  /// Sum of the components.
  int l1() const;
  /// Largest component.
  int sup() const;
  bool is_origin() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  std::string str() const;

 private:
  std::vector<int> c_;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const noexcept;
};

/// Componentwise a <= b. Throws std::invalid_argument on dimension mismatch.
bool partial_le(const MultiIndex& a, const MultiIndex& b);
/// Componentwise maximum.
MultiIndex join(const MultiIndex& a, const MultiIndex& b);
/// Componentwise minimum.
MultiIndex meet(const MultiIndex& a, const MultiIndex& b);

struct SignedCorner {
  MultiIndex index;
  int sign = 1;
};

/// Inclusion-exclusion expansion of the mixed difference at alpha:
/// {(alpha - r, (-1)^{|r|}) : r in {0,1}^d, r <= alpha}. Offsets that would
/// leave the lattice are dropped since the per-axis difference is the identity
/// at a zero component. The first entry is always alpha itself with sign +1.
std::vector<SignedCorner> signed_corners(const MultiIndex& alpha);

/// The box I_m^n = {alpha : m <= alpha <= n}.
class IndexBox {
 public:
  IndexBox(MultiIndex lower, MultiIndex upper);
  /// I_0^upper.
  explicit IndexBox(MultiIndex upper);

  const MultiIndex& lower() const { return lower_; }
  const MultiIndex& upper() const { return upper_; }
  std::size_t dim() const { return lower_.dim(); }
  std::size_t size() const { return size_; }

  bool contains(const MultiIndex& a) const;

  /// Position of `a` in the colexicographic enumeration (axis 0 fastest).
  std::size_t offset(const MultiIndex& a) const;
  MultiIndex at(std::size_t offset) const;

  /// All indices, colexicographic order. Every index appears after all
  /// indices strictly below it in the partial order.
  std::vector<MultiIndex> enumerate() const;

 private:
  MultiIndex lower_;
  MultiIndex upper_;
  std::size_t size_ = 0;
};

/// Sum over the corners of {k,n}^d of (-1)^{#components equal to k} S_alpha.
/// Requires n > k >= 0.
double telescope_corner_sum(int k, int n, std::size_t dim,
                            const std::function<double(const MultiIndex&)>& values);

/// Mixed difference of an arbitrary table evaluated through its signed corners.
double mixed_difference(const MultiIndex& alpha,
                        const std::function<double(const MultiIndex&)>& values);

}  // namespace umimc
