// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "umimc/model.hpp"

namespace umimc {

struct EllipticConfig {
  enum class CoefficientLaw { Uniform, Fixed };

  double sigma = 0.16;
  std::array<double, 2> center{0.5, 0.2};
  /// Elements per axis at level 0.
  int base_elements = 4;
  /// Only indices with |alpha_2 - alpha_1| <= band are computed.
  int band = 2;
  /// Default: Y_1, Y_2 i.i.d. uniform on [-1, 1].
  CoefficientLaw law = CoefficientLaw::Uniform;
  std::array<double, 2> fixed_y{0.5, 0.5};
  double solver_tolerance = 1e-10;
  /// Sparse LDL^T while both levels are <= this, preconditioned CG beyond.
  int direct_level_limit = 5;

  void validate() const;
};

/// Nodal values of the discrete solution on the (nx+1) x (ny+1) grid, x fastest.
struct MeshSolution {
  MultiIndex alpha;
  int nx = 0;
  int ny = 0;
  std::vector<double> nodes;

  double at(int i, int j) const { return nodes[static_cast<std::size_t>(j) * (nx + 1) + i]; }
};

/*!
 * -div(a grad u) = 1 on the unit square, u = 0 on the boundary, with
 *
 *   a(x) = 1 + exp(2 Y_1 sin(pi x_1) cos(pi x_2) + 2 Y_2 cos(4 pi x_1) sin(4 pi x_2)).
 *
 * Index alpha selects a tensor mesh of (b 2^{alpha_1}) x (b 2^{alpha_2}) bilinear
 * elements. The quantity of interest is the Gaussian-mollified integral
 *
 *   X = 100 / (sigma sqrt(2 pi)) * int exp(-|x - x0|^2 / (2 sigma^2)) u(x) dx.
 */
class EllipticModel final : public Model {
 public:
  explicit EllipticModel(EllipticConfig config = {});

  std::size_t dimension() const override { return 2; }
  bool admissible(const MultiIndex& alpha) const override;
  /// Projects onto the band; out-of-band indices reuse the nearest computed mesh
  /// along the finer axis, so their mixed differences vanish.
  MultiIndex canonical(const MultiIndex& beta) const override;
  std::unique_ptr<Realization> realize(RandomStream& rng,
                                       const MultiIndex& finest) const override;

  const EllipticConfig& config() const { return config_; }

  std::array<double, 2> draw_coefficients(RandomStream& rng) const;
  double coefficient(double x1, double x2, const std::array<double, 2>& y) const;
  MeshSolution solve(const MultiIndex& alpha, const std::array<double, 2>& y) const;
  double mollified_functional(const MeshSolution& sol) const;
  /// solve followed by mollified_functional.
  double evaluate(const MultiIndex& alpha, const std::array<double, 2>& y) const;

  /// E[X_alpha] under the configured coefficient law. The uniform law is
  /// integrated with an order x order tensor Gauss-Legendre rule, which
  /// converges spectrally since X_alpha is analytic in (Y_1, Y_2).
  double expected_functional(const MultiIndex& alpha, int order) const;

 private:
  EllipticConfig config_;
};

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace umimc
