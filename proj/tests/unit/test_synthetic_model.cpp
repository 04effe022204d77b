// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "umimc/synthetic_model.hpp"

using namespace umimc;

TEST_SUITE("synthetic_model") {
  TEST_CASE("closed-form corner values") {
    const SyntheticProductModel m({1.0});
    RandomStream rng(1);
    const auto cv = sample_coupled(m, MultiIndex{2}, rng);
    REQUIRE(cv.corners.size() == 2);
    CHECK(cv.corners[0].index == MultiIndex{2});
    CHECK(cv.value(0)[0] == 0.875);
    CHECK(cv.value(1)[0] == 0.75);
    CHECK(cv.increment()[0] == 0.125);
    // Fresh corners cost 2^2 + 2^1.
    CHECK(cv.cost == 6.0);
  }

  TEST_CASE("mean increment matches the signed-corner expansion") {
    const SyntheticProductModel m({1.5, 2.0});
    for (const auto& a : IndexBox(MultiIndex{4, 4}).enumerate()) {
      const double expanded = umimc::testing::brute_mixed_difference(
          a, [&](const MultiIndex& b) { return m.mean(b); });
      CHECK(m.mean_increment(a) == doctest::Approx(expanded).epsilon(1e-13));
    }
  }

  TEST_CASE("shared Gaussian cancels in every increment away from the origin") {
    const SyntheticProductModel noisy({1.0, 2.0}, 0.7);
    const SyntheticProductModel clean({1.0, 2.0});
    RandomStream rng(8);
    for (const auto& a : IndexBox(MultiIndex{3, 3}).enumerate()) {
      const auto inc = sample_coupled(noisy, a, rng).increment()[0];
      if (a.is_origin()) continue;
      CHECK(inc == doctest::Approx(clean.mean_increment(a)).epsilon(1e-12));
    }
  }

  TEST_CASE("product moments") {
    const SyntheticProductModel m({1.0, 2.0}, 0.3, 0.4);
    RandomStream rng(12);
    const MultiIndex b{1, 0}, g{2, 2};
    umimc::testing::Moments sb, sbg;
    for (int i = 0; i < 40000; ++i) {
      auto r = m.realize(rng, g);
      double vb = 0, vg = 0;
      r->evaluate(b, std::span<double>(&vb, 1));
      r->evaluate(g, std::span<double>(&vg, 1));
      sb.add(vb);
      sbg.add(vb * vg);
    }
    CHECK(std::abs(sb.mean() - m.mean(b)) < 4 * sb.stderr_of_mean());
    CHECK(std::abs(sbg.mean() - m.product_moment(b, g)) < 4 * sbg.stderr_of_mean());
  }

  TEST_CASE("increment decay exponent") {
    const double p = 2.0;
    const SyntheticProductModel m({p, p});
    std::vector<double> x, y;
    for (const auto& a : IndexBox(MultiIndex{5, 5}).enumerate()) {
      x.push_back(a.l1());
      y.push_back(std::log2(std::abs(m.mean_increment(a))));
    }
    CHECK(std::abs(-umimc::testing::fitted_slope(x, y) - p) < 0.2);
  }

  TEST_CASE("bias vanishes") {
    const SyntheticProductModel m({1.0, 0.5});
    double prev = 1.0;
    for (int k = 0; k < 30; ++k) {
      const double bias = std::abs(m.limit() - m.mean(MultiIndex::constant(2, k)));
      CHECK(bias < prev);
      prev = bias;
    }
    CHECK(prev < 1e-4);
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(SyntheticProductModel({}), std::invalid_argument);
    CHECK_THROWS_AS(SyntheticProductModel({0.0}), std::invalid_argument);
    CHECK_THROWS_AS(SyntheticProductModel({1.0}, -1.0), std::invalid_argument);
  }
}
