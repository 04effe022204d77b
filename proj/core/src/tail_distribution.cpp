// SPDX-License-Identifier: Apache-2.0
#include "umimc/tail_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace umimc {

namespace {

int geometric_draw(double ratio, RandomStream& rng) {
  // Inversion: P(floor(log U / log rho) >= k) = P(U <= rho^k) with U in (0, 1].
  const double u = 1.0 - rng.uniform();
  const double n = std::floor(std::log(u) / std::log(ratio));
  return n > 1e9 ? 1000000000 : static_cast<int>(n);
}

void check_ratio(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("geometric ratio must lie in (0, 1)");
}

}  // namespace

TailDistribution TailDistribution::product_geometric(std::vector<double> ratios) {
  if (ratios.empty()) throw std::invalid_argument("product geometric tail needs d >= 1");
  for (double r : ratios) check_ratio(r);
  TailDistribution t;
  t.kind_ = Kind::ProductGeometric;
  t.dim_ = ratios.size();
  t.ratios_ = std::move(ratios);
  return t;
}

TailDistribution TailDistribution::diagonal_geometric(std::size_t dim, double ratio) {
  if (dim == 0) throw std::invalid_argument("diagonal tail needs d >= 1");
  check_ratio(ratio);
  TailDistribution t;
  t.kind_ = Kind::DiagonalGeometric;
  t.dim_ = dim;
  t.ratios_ = {ratio};
  return t;
}

TailDistribution TailDistribution::diagonal_empirical(std::size_t dim, std::vector<int> shells,
                                                      std::vector<double> values, int cap) {
  if (dim == 0) throw std::invalid_argument("diagonal tail needs d >= 1");
  if (shells.empty() || shells.size() != values.size()) {
    throw std::invalid_argument("empirical tail needs one value per shell");
  }
  if (shells.front() != 0) throw std::invalid_argument("first shell must start at level 0");
  if (values.front() != 1.0) throw std::invalid_argument("tail value of the first shell must be 1");
  for (std::size_t j = 1; j < shells.size(); ++j) {
    if (shells[j] <= shells[j - 1]) throw std::invalid_argument("shell starts must increase");
    if (!(values[j] < values[j - 1])) {
      throw std::invalid_argument("tail values must be strictly decreasing across shells");
    }
  }
  if (!(values.back() > 0.0)) throw std::invalid_argument("tail values must be positive");
  if (cap < shells.back()) throw std::invalid_argument("cap precedes the last shell start");
  TailDistribution t;
  t.kind_ = Kind::DiagonalEmpirical;
  t.dim_ = dim;
  t.shells_ = std::move(shells);
  t.values_ = std::move(values);
  t.cap_ = cap;
  return t;
}

TailDistribution TailDistribution::truncated(int cap) const {
  if (cap < 0) throw std::invalid_argument("truncation cap must be >= 0");
  TailDistribution t = *this;
  t.cap_ = cap_ ? std::min(*cap_, cap) : cap;
  if (t.kind_ == Kind::DiagonalEmpirical) {
    // Drop shells that start past the new cap.
    while (t.shells_.size() > 1 && t.shells_.back() > *t.cap_) {
      t.shells_.pop_back();
      t.values_.pop_back();
    }
  }
  return t;
}

double TailDistribution::base_survival(int axis, int k) const {
  if (k <= 0) return 1.0;
  switch (kind_) {
    case Kind::ProductGeometric:
      return std::pow(ratios_[static_cast<std::size_t>(axis)], k);
    case Kind::DiagonalGeometric:
      return std::pow(ratios_[0], k);
    case Kind::DiagonalEmpirical: {
      const auto it = std::upper_bound(shells_.begin(), shells_.end(), k);
      return values_[static_cast<std::size_t>(it - shells_.begin()) - 1];
    }
  }
  return 0.0;
}

double TailDistribution::tail_prob(const MultiIndex& alpha) const {
  if (alpha.dim() != dim_) throw std::invalid_argument("tail dimension mismatch");
  if (cap_) {
    for (int v : alpha.components()) {
      if (v > *cap_) return 0.0;
    }
  }
  if (diagonal()) return base_survival(0, alpha.sup());
  double p = 1.0;
  for (std::size_t i = 0; i < dim_; ++i) p *= base_survival(static_cast<int>(i), alpha[i]);
  return p;
}

double TailDistribution::shell_prob(int k) const {
  if (!diagonal()) throw std::logic_error("shell_prob requires a diagonal tail");
  if (cap_ && k > *cap_) return 0.0;
  return base_survival(0, k);
}

double TailDistribution::truncated_mass(const MultiIndex& nu, int n) const {
  if (nu.dim() != dim_) throw std::invalid_argument("tail dimension mismatch");
  std::vector<std::size_t> open_axes;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (nu[i] > n) return 0.0;
    if (nu[i] < n) open_axes.push_back(i);
  }
  double mass = 0.0;
  std::vector<int> c(nu.components().begin(), nu.components().end());
  for (std::size_t mask = 0; mask < (std::size_t{1} << open_axes.size()); ++mask) {
    int sign = 1;
    for (std::size_t j = 0; j < open_axes.size(); ++j) {
      const bool up = (mask >> j) & 1u;
      c[open_axes[j]] = nu[open_axes[j]] + (up ? 1 : 0);
      if (up) sign = -sign;
    }
    mass += sign * tail_prob(MultiIndex(c));
  }
  return mass;
}

MultiIndex TailDistribution::sample(RandomStream& rng) const {
  std::vector<int> c(dim_);
  switch (kind_) {
    case Kind::ProductGeometric:
      for (std::size_t i = 0; i < dim_; ++i) c[i] = geometric_draw(ratios_[i], rng);
      break;
    case Kind::DiagonalGeometric:
      std::fill(c.begin(), c.end(), geometric_draw(ratios_[0], rng));
      break;
    case Kind::DiagonalEmpirical: {
      const double u = rng.uniform();
      // Largest shell j with F_j > u; N sits at the last level of that shell.
      std::size_t j = 0;
      while (j + 1 < values_.size() && values_[j + 1] > u) ++j;
      const int level = (j + 1 < shells_.size()) ? shells_[j + 1] - 1 : *cap_;
      std::fill(c.begin(), c.end(), level);
      break;
    }
  }
  if (cap_) {
    for (int& v : c) v = std::min(v, *cap_);
  }
  return MultiIndex(std::move(c));
}

std::string TailDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::ProductGeometric:
      os << "product_geometric(rho=";
      for (std::size_t i = 0; i < ratios_.size(); ++i) os << (i ? "," : "") << ratios_[i];
      os << ')';
      break;
    case Kind::DiagonalGeometric:
      os << "diagonal_geometric(d=" << dim_ << ",rho=" << ratios_[0] << ')';
      break;
    case Kind::DiagonalEmpirical:
      os << "diagonal_empirical(d=" << dim_ << ",shells=";
      for (std::size_t j = 0; j < shells_.size(); ++j) {
        os << (j ? "," : "") << shells_[j] << ':' << values_[j];
      }
      os << ')';
      break;
  }
  if (cap_) os << " cap=" << *cap_;
  return os.str();
}

TailDistribution from_optimal_sequence(std::size_t dim, const std::vector<int>& shells,
                                       const std::vector<double>& values, int cap) {
  return TailDistribution::diagonal_empirical(dim, shells, values, cap);
}

}  // namespace umimc
