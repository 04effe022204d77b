// SPDX-License-Identifier: Apache-2.0
#include "umimc/elliptic_model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace umimc {

void EllipticConfig::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  for (double c : center) {
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("center must lie inside (0,1)^2");
  }
  if (base_elements < 2) throw std::invalid_argument("base_elements must be >= 2");
  if (band < 0) throw std::invalid_argument("band must be >= 0");
  if (!(solver_tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
}

namespace {

class EllipticRealization final : public Realization {
 public:
  EllipticRealization(const EllipticModel& model, std::array<double, 2> y)
      : model_(model), y_(y) {}

  void evaluate(const MultiIndex& beta, std::span<double> out) override {
    out[0] = model_.evaluate(beta, y_);
  }

 private:
  const EllipticModel& model_;
  std::array<double, 2> y_;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

}  // namespace

EllipticModel::EllipticModel(EllipticConfig config) : config_(config) { config_.validate(); }

bool EllipticModel::admissible(const MultiIndex& alpha) const {
  return alpha.dim() == 2 && std::abs(alpha[1] - alpha[0]) <= config_.band;
}

MultiIndex EllipticModel::canonical(const MultiIndex& beta) const {
  if (beta.dim() != 2) throw std::invalid_argument("elliptic indices are two-dimensional");
  const int b = config_.band;
  return MultiIndex{std::min(beta[0], beta[1] + b), std::min(beta[1], beta[0] + b)};
}

std::unique_ptr<Realization> EllipticModel::realize(RandomStream& rng, const MultiIndex&) const {
  return std::make_unique<EllipticRealization>(*this, draw_coefficients(rng));
}

std::array<double, 2> EllipticModel::draw_coefficients(RandomStream& rng) const {
  if (config_.law == EllipticConfig::CoefficientLaw::Fixed) return config_.fixed_y;
  const double y1 = rng.uniform(-1.0, 1.0);
  const double y2 = rng.uniform(-1.0, 1.0);
  return {y1, y2};
}

double EllipticModel::coefficient(double x1, double x2, const std::array<double, 2>& y) const {
  using std::numbers::pi;
  return 1.0 + std::exp(2.0 * y[0] * std::sin(pi * x1) * std::cos(pi * x2) +
                        2.0 * y[1] * std::cos(4.0 * pi * x1) * std::sin(4.0 * pi * x2));
}

MeshSolution EllipticModel::solve(const MultiIndex& alpha, const std::array<double, 2>& y) const {
  if (!admissible(alpha)) throw std::invalid_argument("index outside the band: " + alpha.str());
  MeshSolution sol;
  sol.alpha = alpha;
  sol.nx = config_.base_elements << alpha[0];
  sol.ny = config_.base_elements << alpha[1];
  const int nx = sol.nx, ny = sol.ny;
  const double hx = 1.0 / nx, hy = 1.0 / ny;

  // Interior node (i, j), 1 <= i < nx, 1 <= j < ny, maps to (j-1)(nx-1) + (i-1).
  const int mx = nx - 1, my = ny - 1;
  const Eigen::Index unknowns = static_cast<Eigen::Index>(mx) * my;
  auto dof = [mx](int i, int j) { return static_cast<Eigen::Index>(j - 1) * mx + (i - 1); };

  // 1D element matrices; the bilinear element matrix is a Kronecker combination.
  const double kx[2][2] = {{1.0 / hx, -1.0 / hx}, {-1.0 / hx, 1.0 / hx}};
  const double ky[2][2] = {{1.0 / hy, -1.0 / hy}, {-1.0 / hy, 1.0 / hy}};
  const double mxm[2][2] = {{hx / 3.0, hx / 6.0}, {hx / 6.0, hx / 3.0}};
  const double mym[2][2] = {{hy / 3.0, hy / 6.0}, {hy / 6.0, hy / 3.0}};
  double local[4][4];
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const int ia = a & 1, ja = a >> 1, ib = b & 1, jb = b >> 1;
      local[a][b] = kx[ia][ib] * mym[ja][jb] + mxm[ia][ib] * ky[ja][jb];
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nx) * ny * 16);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
  const double load = 0.25 * hx * hy;
  for (int ej = 0; ej < ny; ++ej) {
    for (int ei = 0; ei < nx; ++ei) {
      const double a = coefficient((ei + 0.5) * hx, (ej + 0.5) * hy, y);
      int node_i[4], node_j[4];
      bool interior[4];
      for (int k = 0; k < 4; ++k) {
        node_i[k] = ei + (k & 1);
        node_j[k] = ej + (k >> 1);
        interior[k] = node_i[k] > 0 && node_i[k] < nx && node_j[k] > 0 && node_j[k] < ny;
      }
      for (int r = 0; r < 4; ++r) {
        if (!interior[r]) continue;
        const Eigen::Index row = dof(node_i[r], node_j[r]);
        rhs[row] += load;
        for (int c = 0; c < 4; ++c) {
          if (interior[c]) triplets.emplace_back(row, dof(node_i[c], node_j[c]), a * local[r][c]);
        }
      }
    }
  }
  SparseMatrix k(unknowns, unknowns);
  k.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::VectorXd u;
  if (alpha[0] <= config_.direct_level_limit && alpha[1] <= config_.direct_level_limit) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(k);
    assert(ldlt.info() == Eigen::Success);
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("stiffness factorization failed");
    u = ldlt.solve(rhs);
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(config_.solver_tolerance);
    cg.setMaxIterations(static_cast<Eigen::Index>(10 * unknowns));
    cg.compute(k);
    if (cg.info() != Eigen::Success) throw std::runtime_error("preconditioner setup failed");
    u = cg.solve(rhs);
    if (cg.info() != Eigen::Success) throw std::runtime_error("CG did not converge");
  }

  sol.nodes.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      sol.nodes[static_cast<std::size_t>(j) * (nx + 1) + i] = u[dof(i, j)];
    }
  }
  return sol;
}

double EllipticModel::mollified_functional(const MeshSolution& sol) const {
  const double hx = 1.0 / sol.nx, hy = 1.0 / sol.ny;
  const double s2 = 2.0 * config_.sigma * config_.sigma;
  // The weight separates, so tabulate each axis once.
  std::vector<double> wx(static_cast<std::size_t>(sol.nx)), wy(static_cast<std::size_t>(sol.ny));
  for (int i = 0; i < sol.nx; ++i) {
    const double d = (i + 0.5) * hx - config_.center[0];
    wx[static_cast<std::size_t>(i)] = std::exp(-d * d / s2);
  }
  for (int j = 0; j < sol.ny; ++j) {
    const double d = (j + 0.5) * hy - config_.center[1];
    wy[static_cast<std::size_t>(j)] = std::exp(-d * d / s2);
  }
  double total = 0.0;
  for (int j = 0; j < sol.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < sol.nx; ++i) {
      const double mid =
          0.25 * (sol.at(i, j) + sol.at(i + 1, j) + sol.at(i, j + 1) + sol.at(i + 1, j + 1));
      row += wx[static_cast<std::size_t>(i)] * mid;
    }
    total += wy[static_cast<std::size_t>(j)] * row;
  }
  return 100.0 / (config_.sigma * std::sqrt(2.0 * std::numbers::pi)) * total * hx * hy;
}

double EllipticModel::evaluate(const MultiIndex& alpha, const std::array<double, 2>& y) const {
  return mollified_functional(solve(alpha, y));
}

double EllipticModel::expected_functional(const MultiIndex& alpha, int order) const {
  if (config_.law == EllipticConfig::CoefficientLaw::Fixed) return evaluate(alpha, config_.fixed_y);
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  double total = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = 0; b < x.size(); ++b) {
      // Density of uniform[-1,1]^2 is 1/4.
      total += 0.25 * w[a] * w[b] * evaluate(alpha, {x[a], x[b]});
    }
  }
  return total;
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  nodes.resize(static_cast<std::size_t>(order));
  weights.resize(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    nodes[static_cast<std::size_t>(k)] = eig.eigenvalues()[k];
    const double v = eig.eigenvectors()(0, k);
    weights[static_cast<std::size_t>(k)] = 2.0 * v * v;
  }
}

}  // namespace umimc
