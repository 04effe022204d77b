// SPDX-License-Identifier: Apache-2.0
#include "umimc/synthetic_model.hpp"

#include <cmath>
#include <stdexcept>

namespace umimc {

namespace {

class SyntheticRealization final : public Realization {
 public:
  SyntheticRealization(const SyntheticProductModel& model, double u, double g)
      : model_(model), u_(u), g_(g) {}

  void evaluate(const MultiIndex& beta, std::span<double> out) override {
    out[0] = model_.mean(beta) * (1.0 + model_.scale_noise() * u_) + model_.noise() * g_;
  }

 private:
  const SyntheticProductModel& model_;
  double u_;
  double g_;
};

}  // namespace

SyntheticProductModel::SyntheticProductModel(std::vector<double> rates, double noise,
                                             double scale_noise)
    : rates_(std::move(rates)), noise_(noise), scale_noise_(scale_noise) {
  if (rates_.empty()) throw std::invalid_argument("synthetic model needs d >= 1");
  for (double p : rates_) {
    if (!(p > 0.0)) throw std::invalid_argument("synthetic rates must be positive");
  }
  if (noise_ < 0.0 || scale_noise_ < 0.0) {
    throw std::invalid_argument("noise scales must be non-negative");
  }
}

std::unique_ptr<Realization> SyntheticProductModel::realize(RandomStream& rng,
                                                            const MultiIndex&) const {
  // Draw both variates unconditionally so the stream advances identically
  // regardless of the noise settings.
  const double u = rng.normal();
  const double g = rng.normal();
  return std::make_unique<SyntheticRealization>(*this, u, g);
}

double SyntheticProductModel::mean(const MultiIndex& beta) const {
  double d = 1.0;
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    d *= 1.0 - std::exp2(-rates_[i] * (beta[i] + 1));
  }
  return d;
}

double SyntheticProductModel::product_moment(const MultiIndex& beta,
                                             const MultiIndex& gamma) const {
  return mean(beta) * mean(gamma) * (1.0 + scale_noise_ * scale_noise_) + noise_ * noise_;
}

double SyntheticProductModel::mean_increment(const MultiIndex& alpha) const {
  double v = 1.0;
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    v *= std::exp2(-rates_[i] * alpha[i]) * (1.0 - std::exp2(-rates_[i]));
  }
  return v;
}

}  // namespace umimc
