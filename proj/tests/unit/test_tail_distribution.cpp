// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "test_support.hpp"
#include "umimc/tail_distribution.hpp"

using namespace umimc;

namespace {

std::vector<TailDistribution> sample_variants() {
  return {
      TailDistribution::product_geometric({0.5, 0.3}),
      TailDistribution::product_geometric({0.7, 0.4}).truncated(3),
      TailDistribution::diagonal_geometric(2, std::exp2(-1.5)),
      TailDistribution::diagonal_geometric(2, 0.6).truncated(2),
      TailDistribution::diagonal_empirical(2, {0, 2, 3}, {1.0, 0.25, 0.05}, 4),
  };
}

bool within(double observed, double expected, double tol) { return std::abs(observed - expected) <= tol; }

}  // namespace

TEST_SUITE("tail_distribution") {
  TEST_CASE("tail probabilities") {
    const auto pg = TailDistribution::product_geometric({0.5, 0.5});
    CHECK(pg.tail_prob(MultiIndex{2, 1}) == doctest::Approx(0.125));
    const auto emp = TailDistribution::diagonal_empirical(2, {0, 2}, {1.0, 0.25}, 6);
    CHECK(emp.tail_prob(MultiIndex{1, 1}) == 1.0);
    CHECK(emp.tail_prob(MultiIndex{2, 0}) == 0.25);
    CHECK(emp.tail_prob(MultiIndex{6, 6}) == 0.25);
    CHECK(emp.tail_prob(MultiIndex{7, 0}) == 0.0);
    for (const auto& t : sample_variants()) CHECK(t.tail_prob(MultiIndex::zeros(t.dim())) == 1.0);
    CHECK_THROWS_AS(pg.tail_prob(MultiIndex{1}), std::invalid_argument);
  }

  TEST_CASE("monotone and shell constant") {
    for (const auto& t : sample_variants()) {
      const auto grid = IndexBox(MultiIndex{5, 5}).enumerate();
      for (const auto& a : grid) {
        const double fa = t.tail_prob(a);
        CHECK(fa >= 0.0);
        CHECK(fa <= 1.0);
        for (const auto& b : grid) {
          if (partial_le(a, b)) CHECK(fa >= t.tail_prob(b));
          if (t.diagonal() && a.sup() == b.sup()) CHECK(fa == t.tail_prob(b));
        }
      }
    }
  }

  TEST_CASE("squared join bound") {
    for (const auto& t : sample_variants()) {
      const auto grid = IndexBox(MultiIndex{4, 4}).enumerate();
      for (const auto& a : grid) {
        for (const auto& b : grid) {
          const double j = t.tail_prob(join(a, b));
          CHECK(t.tail_prob(a) * t.tail_prob(b) >= j * j * (1.0 - 1e-15));
        }
      }
    }
  }

  TEST_CASE("product factorization") {
    const auto t = TailDistribution::product_geometric({0.45, 0.8, 0.3});
    const auto grid = IndexBox(MultiIndex{3, 3, 3}).enumerate();
    for (const auto& a : grid) {
      for (const auto& b : grid) {
        CHECK(t.tail_prob(join(a, b)) * t.tail_prob(meet(a, b)) ==
              doctest::Approx(t.tail_prob(a) * t.tail_prob(b)).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("diagonal geometric sampling frequency") {
    const auto t = TailDistribution::diagonal_geometric(2, 0.5);
    RandomStream rng(77);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const auto s = t.sample(rng);
      CHECK_UNARY(s[0] == s[1]);
      hits += s[0] >= 3;
    }
    const double p = 0.125;
    CHECK(within(static_cast<double>(hits) / n, p, 3.0 * std::sqrt(p * (1 - p) / n)));
  }

  TEST_CASE("product geometric marginals") {
    const auto t = TailDistribution::product_geometric({0.6, 0.35});
    RandomStream rng(78);
    const int n = 100000;
    int h[2][4] = {};
    for (int i = 0; i < n; ++i) {
      const auto s = t.sample(rng);
      for (int axis = 0; axis < 2; ++axis)
        for (int k = 1; k <= 3; ++k) h[axis][k] += s[static_cast<std::size_t>(axis)] >= k;
    }
    for (int axis = 0; axis < 2; ++axis) {
      for (int k = 1; k <= 3; ++k) {
        const double p = std::pow(t.ratios()[static_cast<std::size_t>(axis)], k);
        CHECK(within(static_cast<double>(h[axis][k]) / n, p, 3.0 * std::sqrt(p * (1 - p) / n)));
      }
    }
  }

  TEST_CASE("truncation") {
    RandomStream rng(1);
    const auto zero = TailDistribution::diagonal_geometric(3, 0.5).truncated(0);
    for (int i = 0; i < 100; ++i) CHECK(zero.sample(rng).is_origin());
    CHECK(zero.tail_prob(MultiIndex{0, 1, 0}) == 0.0);

    const auto t = TailDistribution::diagonal_geometric(1, 0.5).truncated(3);
    CHECK(t.tail_prob(MultiIndex{3}) == 0.125);
    CHECK(t.tail_prob(MultiIndex{4}) == 0.0);
    CHECK(t.truncated(5).cap() == 3);
    // Sampling follows min(N, cap), so the survival function is reproduced.
    const int n = 100000;
    int counts[5] = {};
    for (int i = 0; i < n; ++i) ++counts[t.sample(rng)[0]];
    CHECK(counts[4] == 0);
    int above = n;
    for (int k = 0; k <= 3; ++k) {
      const double p = t.tail_prob(MultiIndex{k});
      CHECK(within(static_cast<double>(above) / n, p, 3.0 * std::sqrt(p * (1 - p) / n) + 1e-12));
      above -= counts[k];
    }
  }

  TEST_CASE("truncated masses sum to one") {
    for (const auto& t : sample_variants()) {
      for (int n = 0; n <= 3; ++n) {
        double total = 0.0;
        for (const auto& nu : IndexBox(MultiIndex::constant(t.dim(), n)).enumerate()) {
          const double m = t.truncated_mass(nu, n);
          CHECK(m >= -1e-15);
          total += m;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("empirical law from optimizer output") {
    RandomStream rng(5);
    const auto single = from_optimal_sequence(2, {0}, {1.0}, 4);
    for (int i = 0; i < 50; ++i) CHECK(single.sample(rng) == MultiIndex{4, 4});

    const auto two = from_optimal_sequence(1, {0, 3}, {1.0, 0.1}, 5);
    CHECK(two.tail_prob(MultiIndex{3}) == 0.1);
    CHECK(two.tail_prob(MultiIndex{2}) == 1.0);
    const int n = 100000;
    int ge3 = 0, at2 = 0;
    for (int i = 0; i < n; ++i) {
      const int v = two.sample(rng)[0];
      ge3 += v >= 3;
      at2 += v == 2;
    }
    CHECK(within(static_cast<double>(ge3) / n, 0.1, 3.0 * std::sqrt(0.09 / n)));
    CHECK(ge3 + at2 == n);

    CHECK_THROWS_AS(from_optimal_sequence(1, {0, 2}, {1.0, 1.0}, 4), std::invalid_argument);
    CHECK_THROWS_AS(from_optimal_sequence(1, {0, 2}, {1.0, 1.2}, 4), std::invalid_argument);
    CHECK_THROWS_AS(from_optimal_sequence(1, {0, 2}, {0.9, 0.2}, 4), std::invalid_argument);
    CHECK_THROWS_AS(from_optimal_sequence(1, {1, 2}, {1.0, 0.2}, 4), std::invalid_argument);
    CHECK_THROWS_AS(from_optimal_sequence(1, {0, 5}, {1.0, 0.2}, 4), std::invalid_argument);
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(TailDistribution::diagonal_geometric(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(TailDistribution::product_geometric({0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(TailDistribution::product_geometric({}), std::invalid_argument);
    CHECK_THROWS_AS(TailDistribution::product_geometric({0.5}).shell_prob(1), std::logic_error);
    CHECK_THROWS_AS(TailDistribution::diagonal_geometric(1, 0.5).truncated(-1),
                    std::invalid_argument);
  }
}
