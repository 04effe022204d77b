// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace umimc {

/// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

/*!
 * Deterministic random stream identified by a 64-bit key.
 *
 * Child streams are derived from the key alone, never from the engine state,
 * so split(i) gives the same child regardless of how many numbers the parent
 * has produced. The derivation path is key' = mix64(key ^ mix64(i + phi)).
 */
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key);

  RandomStream split(std::uint64_t child) const;
  std::uint64_t key() const { return key_; }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  double normal(double mean, double stddev);

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace umimc
