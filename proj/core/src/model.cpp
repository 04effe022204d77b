// SPDX-License-Identifier: Apache-2.0
#include "umimc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace umimc {

bool Model::admissible(const MultiIndex& alpha) const { return alpha.dim() == dimension(); }

double Model::cost(const MultiIndex& beta) const { return std::ldexp(1.0, beta.l1()); }

CoupledFamily::CoupledFamily(const Model& model, std::unique_ptr<Realization> realization)
    : model_(model), realization_(std::move(realization)) {
  if (!realization_) throw std::invalid_argument("null realization");
}

std::span<const double> CoupledFamily::at(const MultiIndex& beta) {
  const MultiIndex key = model_.canonical(beta);
  auto it = memo_.find(key);
  if (it == memo_.end()) {
    std::vector<double> v(model_.width());
    realization_->evaluate(key, v);
    cost_ += model_.cost(key);
    ++evaluations_;
    it = memo_.emplace(key, std::move(v)).first;
  }
  return it->second;
}

void CoupledFamily::increment(const MultiIndex& alpha, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& corner : signed_corners(alpha)) {
    const auto v = at(corner.index);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += corner.sign * v[c];
  }
}

std::vector<double> CornerValues::increment() const {
  std::vector<double> out(width, 0.0);
  for (std::size_t k = 0; k < corners.size(); ++k) {
    const auto v = value(k);
    for (std::size_t c = 0; c < width; ++c) out[c] += corners[k].sign * v[c];
  }
  return out;
}

CornerValues sample_coupled(const Model& model, const MultiIndex& alpha, RandomStream& rng) {
  if (alpha.dim() != model.dimension()) throw std::invalid_argument("model dimension mismatch");
  CoupledFamily family(model, model.realize(rng, alpha));
  CornerValues out{alpha, signed_corners(alpha), {}, model.width(), 0.0};
  out.values.reserve(out.corners.size() * out.width);
  for (const auto& corner : out.corners) {
    const auto v = family.at(corner.index);
    out.values.insert(out.values.end(), v.begin(), v.end());
  }
  out.cost = family.cost();
  return out;
}

}  // namespace umimc
