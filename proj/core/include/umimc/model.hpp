// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "umimc/lattice.hpp"
#include "umimc/random_stream.hpp"

namespace umimc {

/// One draw of the underlying randomness omega. Evaluating it at different
/// indices yields common-random-number coupled approximations S_beta(omega).
class Realization {
 public:
  virtual ~Realization() = default;
  /// Writes S_beta(omega) into `out` (one entry per model output component).
  virtual void evaluate(const MultiIndex& beta, std::span<double> out) = 0;
};

/*!
 * Contract for a family of biased approximations S_alpha = phi(X_alpha).
 *
 * Implementations must be re-entrant: all randomness enters through the
 * stream handed to realize(). Models may restrict which meshes they compute
 * through admissible(); canonical() maps any lattice point to the index whose
 * value stands in for it, so the mixed difference of a non-admissible index
 * vanishes identically and telescoping sums still collapse.
 */
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t dimension() const = 0;
  /// Number of scalar outputs per evaluation (vector-valued models use > 1).
  virtual std::size_t width() const { return 1; }
  virtual bool admissible(const MultiIndex& alpha) const;
  virtual MultiIndex canonical(const MultiIndex& beta) const { return beta; }
  /// Work units for computing one fresh S_beta; 2^{|beta|} by default.
  virtual double cost(const MultiIndex& beta) const;

  /// Draw omega. `finest` bounds every index that will be evaluated on the
  /// returned realization, which lets path-based models size their driver.
  virtual std::unique_ptr<Realization> realize(RandomStream& rng,
                                               const MultiIndex& finest) const = 0;
};

/// Memoized view of one realization: each canonical index is computed once
/// and its cost charged once.
class CoupledFamily {
 public:
  CoupledFamily(const Model& model, std::unique_ptr<Realization> realization);

  std::span<const double> at(const MultiIndex& beta);
  /// Sum of signed corner values of alpha, written into `out`.
  void increment(const MultiIndex& alpha, std::span<double> out);

  double cost() const { return cost_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  const Model& model_;
  std::unique_ptr<Realization> realization_;
  std::unordered_map<MultiIndex, std::vector<double>, MultiIndexHash> memo_;
  double cost_ = 0.0;
  std::size_t evaluations_ = 0;
};

/// Corner values S_{alpha - r} of one increment, all from the same omega.
struct CornerValues {
  MultiIndex alpha;
  std::vector<SignedCorner> corners;
  /// corners.size() x width, row-major.
  std::vector<double> values;
  std::size_t width = 1;
  double cost = 0.0;

  std::span<const double> value(std::size_t corner) const {
    return std::span<const double>(values).subspan(corner * width, width);
  }
  /// Signed sum of the corner values, i.e. the mixed difference at alpha.
  std::vector<double> increment() const;
};

/// Draw omega once and evaluate every clipped corner of alpha.
CornerValues sample_coupled(const Model& model, const MultiIndex& alpha, RandomStream& rng);

}  // namespace umimc
