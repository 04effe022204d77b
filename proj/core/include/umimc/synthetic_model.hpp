// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "umimc/model.hpp"

namespace umimc {

/*!
 * Closed-form model used as a correctness oracle.
 *
 *   S_beta(omega) = D_beta * (1 + zeta * U) + eta * G,
 *   D_beta = prod_i (1 - 2^{-p_i (beta_i + 1)}),
 *
 * with U, G independent standard Gaussians shared by every index of one
 * realization. E[S_beta] = D_beta, the limit is S = 1 + zeta U + eta G with
 * mean 1, and the mixed increments decay like 2^{-p . alpha}. The G term
 * cancels in every increment except the one at the origin.
 */
class SyntheticProductModel final : public Model {
 public:
  explicit SyntheticProductModel(std::vector<double> rates, double noise = 0.0,
                                 double scale_noise = 0.0);

  std::size_t dimension() const override { return rates_.size(); }
  std::unique_ptr<Realization> realize(RandomStream& rng,
                                       const MultiIndex& finest) const override;

  const std::vector<double>& rates() const { return rates_; }
  double noise() const { return noise_; }
  double scale_noise() const { return scale_noise_; }

  /// D_beta.
  double mean(const MultiIndex& beta) const;
  /// E[S_beta S_gamma].
  double product_moment(const MultiIndex& beta, const MultiIndex& gamma) const;
  /// E[Delta S_alpha] = prod_i 2^{-p_i alpha_i} (1 - 2^{-p_i}).
  double mean_increment(const MultiIndex& alpha) const;
  double limit() const { return 1.0; }

 private:
  std::vector<double> rates_;
  double noise_;
  double scale_noise_;
};

}  // namespace umimc
