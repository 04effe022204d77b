// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "umimc/elliptic_model.hpp"
#include "umimc/mimc.hpp"
#include "umimc/synthetic_model.hpp"

using namespace umimc;

TEST_SUITE("mimc") {
  TEST_CASE("deterministic model telescopes to the cap") {
    const SyntheticProductModel m({1.0, 2.0});
    MimcConfig cfg;
    cfg.alpha_max = MultiIndex{3, 2};
    cfg.pilot = 3;
    RandomStream rng(1);
    const MimcRun run = run_mimc(m, cfg, rng);
    CHECK(run.uniform_fallback);
    CHECK(run.indices.size() == 12);
    for (auto n : run.samples) CHECK(n == 3);
    CHECK(run.estimate[0] == doctest::Approx(m.mean(MultiIndex{3, 2})).epsilon(1e-13));
    CHECK(run.trajectory.back().estimate[0] == run.estimate[0]);
  }

  TEST_CASE("band restriction keeps the telescoping sum") {
    EllipticConfig ec;
    ec.law = EllipticConfig::CoefficientLaw::Fixed;
    const EllipticModel m(ec);
    MimcConfig cfg;
    cfg.alpha_max = MultiIndex{3, 3};
    cfg.pilot = 2;
    RandomStream rng(2);
    const MimcRun run = run_mimc(m, cfg, rng);
    CHECK(run.indices.size() == 14);
    CHECK(run.estimate[0] == doctest::Approx(m.evaluate(MultiIndex{3, 3}, ec.fixed_y)).epsilon(1e-12));
  }

  TEST_CASE("allocation formula") {
    MimcConfig cfg;
    CHECK(cfg.confidence_constant() == doctest::Approx(1.1503493803760079).epsilon(1e-12));
    const std::vector<double> v{4e-3, 1e-3, 2e-4, 3e-5}, t{1, 4, 16, 64};
    const auto n = allocate_samples(v, t, cfg);
    const double c = std::pow(cfg.confidence_constant() / (cfg.theta * cfg.tol), 2);
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::sqrt(v[i] * t[i]);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(n[i] == static_cast<std::uint64_t>(std::ceil(c * std::sqrt(v[i] / t[i]) * s)));
    }
    // Doubling every variance doubles the allocation up to rounding.
    std::vector<double> v2 = v;
    for (auto& x : v2) x *= 2;
    const auto n2 = allocate_samples(v2, t, cfg);
    const auto total = std::accumulate(n.begin(), n.end(), std::uint64_t{0});
    const auto total2 = std::accumulate(n2.begin(), n2.end(), std::uint64_t{0});
    CHECK(std::abs(static_cast<double>(total2) - 2.0 * static_cast<double>(total)) <= 2.0 * v.size());
    // The resulting statistical error meets theta TOL at the requested confidence.
    double var = 0;
    for (std::size_t i = 0; i < v.size(); ++i) var += v[i] / static_cast<double>(n[i]);
    CHECK(cfg.confidence_constant() * std::sqrt(var) <= cfg.theta * cfg.tol * (1 + 1e-12));
  }

  TEST_CASE("work does not increase with TOL") {
    const SyntheticProductModel m({2.0, 2.0}, 0.05, 0.5);
    double prev = std::numeric_limits<double>::infinity();
    for (double tol : {2e-3, 5e-3, 1e-2, 5e-2}) {
      MimcConfig cfg;
      cfg.tol = tol;
      cfg.alpha_max = MultiIndex{2, 2};
      const std::vector<double> v{1e-3, 2e-4, 5e-5}, t{1, 4, 16};
      const auto n = allocate_samples(v, t, cfg);
      double work = 0;
      for (std::size_t i = 0; i < v.size(); ++i) work += static_cast<double>(n[i]) * t[i];
      CHECK(work <= prev);
      prev = work;
      RandomStream rng(3);
      const auto run = run_mimc(m, cfg, rng);
      CHECK(std::abs(run.estimate[0] - m.mean(MultiIndex{2, 2})) < 4 * tol);
    }
  }

  TEST_CASE("trajectory is cumulative") {
    const SyntheticProductModel m({2.0}, 0.1, 0.3);
    MimcConfig cfg;
    cfg.alpha_max = MultiIndex{4};
    RandomStream rng(4);
    const auto run = run_mimc(m, cfg, rng);
    CHECK_FALSE(run.uniform_fallback);
    for (std::size_t i = 1; i < run.trajectory.size(); ++i) {
      CHECK(run.trajectory[i].cost > run.trajectory[i - 1].cost);
    }
    CHECK(run.trajectory.back().cost == doctest::Approx(run.total_cost));
  }

  TEST_CASE("configuration validation") {
    const SyntheticProductModel m({1.0});
    RandomStream rng(1);
    MimcConfig cfg;
    cfg.alpha_max = MultiIndex{2};
    cfg.theta = 1.0;
    CHECK_THROWS_AS(run_mimc(m, cfg, rng), std::invalid_argument);
    cfg.theta = 0.5;
    cfg.tol = 0.0;
    CHECK_THROWS_AS(run_mimc(m, cfg, rng), std::invalid_argument);
    cfg.tol = 1e-2;
    cfg.alpha_max = MultiIndex{2, 2};
    CHECK_THROWS_AS(run_mimc(m, cfg, rng), std::invalid_argument);
  }
}
