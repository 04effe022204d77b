// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "umimc/elliptic_model.hpp"
#include "umimc/moments.hpp"
#include "umimc/synthetic_model.hpp"

using namespace umimc;

namespace {

IncrementMomentTable exact_table(const SyntheticProductModel& m, int cap) {
  return exact_moment_table(
      m, cap, [&](const MultiIndex& b) { return m.mean(b); },
      [&](const MultiIndex& a, const MultiIndex& b) { return m.product_moment(a, b); });
}

}  // namespace

TEST_SUITE("moments") {
  TEST_CASE("exact table of the deterministic model") {
    const SyntheticProductModel m({1.0, 2.0});
    const int cap = 3;
    const auto t = exact_table(m, cap);
    const double s = m.mean(MultiIndex{cap, cap});
    auto level = [&](int k) { return k < 0 ? 0.0 : m.mean(MultiIndex{k, k}); };
    CHECK(t.mean_limit == doctest::Approx(s));
    for (std::size_t o = 0; o < t.box.size(); ++o) {
      const MultiIndex a = t.box.at(o);
      const double d = m.mean_increment(a);
      const int k = a.sup();
      CHECK(t.mean_increment[o] == doctest::Approx(d).epsilon(1e-13));
      CHECK(t.nu_prime[o] == doctest::Approx(d * (2 * s - level(k - 1) - level(k))).epsilon(1e-12));
      // No randomness: both second-moment tables coincide.
      CHECK(t.nu_tilde_prime[o] == doctest::Approx(t.nu_prime[o]).epsilon(1e-12));
      for (std::size_t q = 0; q < t.box.size(); ++q) {
        CHECK(t.pair[o * t.box.size() + q] ==
              doctest::Approx(d * m.mean_increment(t.box.at(q))).epsilon(1e-12));
      }
      CHECK(t.cost_coupled[o] == std::ldexp(1.0, a.l1()));
    }
    const auto mu = t.mu_prime(EstimatorKind::DiagonalCoupled);
    CHECK(mu[0] == doctest::Approx(t.nu_prime[0] - s * s));
  }

  TEST_CASE("pilot estimate of the deterministic model is exact") {
    const SyntheticProductModel m({1.5, 1.0});
    RandomStream rng(1);
    const auto est = estimate_moment_tables(m, 5, 3, rng);
    const auto ex = exact_table(m, 3);
    for (std::size_t o = 0; o < ex.box.size(); ++o) {
      CHECK(est.nu_prime[o] == doctest::Approx(ex.nu_prime[o]).epsilon(1e-12));
      CHECK(est.nu_tilde_prime[o] == doctest::Approx(ex.nu_tilde_prime[o]).epsilon(1e-12));
      CHECK(est.nu_prime_stderr[o] == doctest::Approx(0.0));
      CHECK(est.cost_independent[o] == ex.cost_independent[o]);
    }
    CHECK_THROWS_AS(estimate_moment_tables(m, 1, 3, rng), std::invalid_argument);
  }

  TEST_CASE("pilot origin entry uses the sample mean of the proxy") {
    const SyntheticProductModel m({2.0, 2.0}, 0.4, 0.3);
    RandomStream rng(2);
    const auto est = estimate_moment_tables(m, 400, 2, rng);
    const auto mu = est.mu_prime(EstimatorKind::CoupledSum);
    CHECK(mu[0] == doctest::Approx(est.nu_prime[0] - est.mean_limit * est.mean_limit));
    const auto ex = exact_table(m, 2);
    for (std::size_t o = 0; o < ex.box.size(); ++o) {
      CHECK(std::abs(est.nu_prime[o] - ex.nu_prime[o]) < 5.0 * est.nu_prime_stderr[o] + 1e-14);
    }
    CHECK(std::abs(est.mean_limit - ex.mean_limit) < 5.0 * est.mean_limit_stderr);
  }

  TEST_CASE("degenerate tail") {
    const SyntheticProductModel m({1.0, 2.0}, 0.5, 0.2);
    const auto t = exact_table(m, 0);
    const auto tail = TailDistribution::diagonal_geometric(2, 0.5).truncated(0);
    CHECK(second_moment_coupled(t, tail) == doctest::Approx(t.pair[0]));
    CHECK(second_moment_diagonal_coupled(t, tail) == doctest::Approx(m.product_moment({0, 0}, {0, 0})));
    CHECK(second_moment_diagonal_independent(t, tail) ==
          doctest::Approx(m.product_moment({0, 0}, {0, 0})));
  }

  TEST_CASE("one-dimensional reductions") {
    const SyntheticProductModel m({1.5}, 0.3, 0.6);
    for (int cap : {1, 3, 5}) {
      const auto t = exact_table(m, cap);
      const auto tail = TailDistribution::diagonal_geometric(1, 0.55).truncated(cap);
      const auto prod = TailDistribution::product_geometric({0.55}).truncated(cap);
      const double level = second_moment_level_sum(t, tail);
      CHECK(second_moment_coupled(t, prod) == doctest::Approx(level).epsilon(1e-10));
      CHECK(second_moment_diagonal_coupled(t, tail) == doctest::Approx(level).epsilon(1e-10));
    }
  }

  TEST_CASE("diagonal coupled equals the level-sum form in higher dimension") {
    const SyntheticProductModel m({1.0, 2.0, 1.5}, 0.2, 0.4);
    const auto t = exact_table(m, 2);
    const auto tail = TailDistribution::diagonal_geometric(3, 0.4).truncated(2);
    CHECK(second_moment_diagonal_coupled(t, tail) ==
          doctest::Approx(second_moment_level_sum(t, tail)).epsilon(1e-10));
    CHECK_THROWS_AS(second_moment_level_sum(t, TailDistribution::product_geometric({0.5, 0.5, 0.5})),
                    std::invalid_argument);
  }

  TEST_CASE("independent-sum second moment by exhaustive enumeration") {
    // Two-point scalar N in {0, 1}; given N every increment is independent,
    // so E[Z^2 | N] = sum_a E[D_a^2]/F_a^2 + sum_{a != b} E D_a E D_b / (F_a F_b).
    const SyntheticProductModel m({1.0, 2.0}, 0.5, 0.7);
    const auto t = exact_table(m, 1);
    const double f1 = 0.3;
    const auto tail = TailDistribution::diagonal_empirical(2, {0, 1}, {1.0, f1}, 1);
    const std::size_t nb = t.box.size();
    auto conditional = [&](int n) {
      double s = 0.0;
      for (std::size_t a = 0; a < nb; ++a) {
        const MultiIndex ia = t.box.at(a);
        if (ia.sup() > n) continue;
        const double fa = ia.sup() == 0 ? 1.0 : f1;
        for (std::size_t b = 0; b < nb; ++b) {
          const MultiIndex ib = t.box.at(b);
          if (ib.sup() > n) continue;
          const double fb = ib.sup() == 0 ? 1.0 : f1;
          const double e = a == b ? t.pair[a * nb + a] : t.mean_increment[a] * t.mean_increment[b];
          s += e / (fa * fb);
        }
      }
      return s;
    };
    const double direct = (1 - f1) * conditional(0) + f1 * conditional(1);
    CHECK(second_moment_diagonal_independent(t, tail) == doctest::Approx(direct).epsilon(1e-12));
  }

  TEST_CASE("elliptic cost table grows along the diagonal") {
    EllipticConfig cfg;
    cfg.law = EllipticConfig::CoefficientLaw::Fixed;
    const EllipticModel m(cfg);
    RandomStream rng(1);
    const auto t = estimate_moment_tables(m, 2, 3, rng);
    double prev = 0.0;
    for (int k = 0; k <= 3; ++k) {
      const double c = t.cost_independent[t.box.offset(MultiIndex{k, k})];
      CHECK(c > prev);
      prev = c;
    }
    // Out-of-band increments are exactly zero and cost nothing.
    CHECK(t.cost_independent[t.box.offset(MultiIndex{0, 3})] == 0.0);
    CHECK(t.mean_increment[t.box.offset(MultiIndex{0, 3})] == 0.0);
  }
}
