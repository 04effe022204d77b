// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "umimc/estimators.hpp"
#include "umimc/spde_model.hpp"

using namespace umimc;
using std::numbers::pi;

namespace {

/// Independent scalar log-likelihood.
double oracle_log_likelihood(const std::vector<double>& y, const std::vector<double>& x, double s) {
  double v = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    v += std::log(1.0 / (std::sqrt(2.0 * pi) * s) * std::exp(-(y[i] - x[i]) * (y[i] - x[i]) / (2 * s * s)));
  }
  return v;
}

}  // namespace

TEST_SUITE("spde") {
  TEST_CASE("observation layout") {
    const SpdeModel m;
    const auto t = m.observation_times();
    const auto o = m.observation_locations();
    REQUIRE(t.size() == 3);
    REQUIRE(o.size() == 4);
    for (int k = 0; k < 3; ++k) CHECK(t[static_cast<std::size_t>(k)] == doctest::Approx(0.1 * (k + 1) / 3.0));
    for (int l = 0; l < 4; ++l) CHECK(o[static_cast<std::size_t>(l)] == doctest::Approx((l + 1) / 5.0));
    CHECK(m.config().master() == MultiIndex{7, 7});
    CHECK(m.config().inference_sigma() == doctest::Approx(0.1));
    CHECK(SpdeModel::modes_at(3) == 16);
  }

  TEST_CASE("pure heat decay is exact") {
    SpdeConfig c;
    c.mode_variance = 0.0;
    c.reaction = 0.0;
    const SpdeModel m(c);
    RandomStream rng(1);
    const auto driver = m.make_driver(MultiIndex{2, 0}, rng);
    const auto path = m.exponential_euler_path(MultiIndex{2, 0}, driver);
    for (int n = 1; n <= path.modes; ++n) {
      CHECK(path.final[static_cast<std::size_t>(n - 1)] ==
            doctest::Approx(std::exp(-n * n * pi * pi * 0.1) / n).epsilon(1e-14));
    }
  }

  TEST_CASE("drift converges to the scalar ODE at first order") {
    SpdeConfig c;
    c.mode_variance = 0.0;
    const SpdeModel m(c);
    RandomStream rng(1);
    const auto driver = m.make_driver(MultiIndex{1, 9}, rng);
    std::vector<double> x, y;
    for (int l = 3; l <= 9; ++l) {
      const auto path = m.exponential_euler_path(MultiIndex{1, l}, driver);
      double err = 0;
      for (int n = 1; n <= path.modes; ++n) {
        const double exact = std::exp((0.5 - n * n * pi * pi) * 0.1) / n;
        err = std::max(err, std::abs(path.final[static_cast<std::size_t>(n - 1)] - exact));
      }
      x.push_back(l);
      y.push_back(std::log2(err));
    }
    CHECK(-umimc::testing::fitted_slope(x, y) == doctest::Approx(1.0).epsilon(0.15));

    // The full-linear split integrates the same ODE exactly.
    c.full_linear = true;
    const SpdeModel exact(c);
    const auto p = exact.exponential_euler_path(MultiIndex{1, 2}, driver);
    CHECK(p.final[0] == doctest::Approx(std::exp((0.5 - pi * pi) * 0.1)).epsilon(1e-13));
  }

  TEST_CASE("driver refinement and mode prefix are exact") {
    const SpdeModel m;
    RandomStream rng(5);
    const auto d = m.make_driver(MultiIndex{2, 6}, rng);
    for (int mode = 0; mode < d.modes(); ++mode) {
      for (int l = 0; l < 6; ++l) {
        const auto fine = d.increments(mode, l + 1);
        const auto coarse = d.increments(mode, l);
        for (std::size_t j = 0; j < coarse.size(); ++j) CHECK(coarse[j] == fine[2 * j] + fine[2 * j + 1]);
      }
    }
    const auto small = m.exponential_euler_path(MultiIndex{1, 4}, d);
    const auto big = m.exponential_euler_path(MultiIndex{2, 4}, d);
    for (int n = 0; n < small.modes; ++n) {
      CHECK(small.final[static_cast<std::size_t>(n)] == big.final[static_cast<std::size_t>(n)]);
    }
    CHECK_THROWS_AS(m.exponential_euler_path(MultiIndex{3, 4}, d), std::invalid_argument);
    CHECK_THROWS_AS(m.exponential_euler_path(MultiIndex{1, 7}, d), std::invalid_argument);
  }

  TEST_CASE("coupled paths contract at rate h") {
    const SpdeModel m;
    RandomStream root(9);
    std::vector<double> x, y;
    for (int l = 3; l <= 7; ++l) {
      double sq = 0;
      const int reps = 300;
      for (int r = 0; r < reps; ++r) {
        RandomStream rng = root.split(static_cast<std::uint64_t>(r));
        const auto d = m.make_driver(MultiIndex{0, 7}, rng);
        const auto a = m.exponential_euler_path(MultiIndex{0, l}, d);
        const auto b = m.exponential_euler_path(MultiIndex{0, l - 1}, d);
        sq += std::pow(a.final[0] - b.final[0], 2);
      }
      x.push_back(l);
      y.push_back(0.5 * std::log2(sq / reps));
    }
    CHECK(-umimc::testing::fitted_slope(x, y) == doctest::Approx(1.0).epsilon(0.3));
  }

  TEST_CASE("coarse paths from a fine driver have the scheme's marginal law") {
    const SpdeModel m;
    const auto& c = m.config();
    const int level = 3, steps = 1 << level;
    const double h = c.horizon / steps;
    RandomStream root(12);
    const int reps = 20000;
    for (int n : {1, 3}) {
      const double lam = n * n * pi * pi;
      const double a = std::exp(-lam * h) + (1 - std::exp(-lam * h)) / lam * c.reaction;
      const double b2 = std::exp(-2 * lam * h) * c.mode_variance * h;
      const double var = b2 * (1 - std::pow(a, 2 * steps)) / (1 - a * a);
      umimc::testing::Moments s;
      for (int r = 0; r < reps; ++r) {
        RandomStream rng = root.split(static_cast<std::uint64_t>(r));
        const auto d = m.make_driver(MultiIndex{1, 6}, rng);
        s.add(m.exponential_euler_path(MultiIndex{1, level}, d).final[static_cast<std::size_t>(n - 1)]);
      }
      const double se_var = var * std::sqrt(2.0 / (reps - 1));
      CHECK(std::abs(s.variance() - var) < 3 * se_var);
      CHECK(std::abs(s.mean() - std::pow(a, steps) / n) < 4 * s.stderr_of_mean());
    }
  }

  TEST_CASE("likelihood") {
    const std::vector<double> y{0.1, -0.3, 0.25, 0.0};
    CHECK(gaussian_log_likelihood(y, y, 0.1) == doctest::Approx(4 * std::log(1.0 / (std::sqrt(2 * pi) * 0.1))));
    std::vector<double> x = y;
    x[2] += 0.1;
    CHECK(std::exp(gaussian_log_likelihood(y, x, 0.1) - gaussian_log_likelihood(y, y, 0.1)) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    RandomStream rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> a(5), b(5);
      for (std::size_t i = 0; i < 5; ++i) {
        a[i] = rng.normal(0.0, 0.2);
        b[i] = rng.normal(0.0, 0.2);
      }
      CHECK(gaussian_log_likelihood(a, b, 0.1) == doctest::Approx(oracle_log_likelihood(a, b, 0.1)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gaussian_log_likelihood(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}, 0.1), std::invalid_argument);
  }

  TEST_CASE("space integral of the path") {
    const SpdeModel m;
    SpectralPath p;
    p.modes = 4;
    p.final = {1.0, 0.0, 0.0, 0.0};
    CHECK(m.path_integral_functional(p) == doctest::Approx(std::numbers::sqrt2 * 2.0 / pi));
    p.final = {0.0, 3.0, 0.0, -2.0};
    CHECK(m.path_integral_functional(p) == 0.0);

    // Initial condition against midpoint quadrature of the truncated series.
    const int modes = 64;
    p.modes = modes;
    p.final.resize(modes);
    for (int n = 1; n <= modes; ++n) p.final[static_cast<std::size_t>(n - 1)] = 1.0 / n;
    const int q = 20000;
    double integral = 0.0;
    for (int i = 0; i < q; ++i) {
      const double xq = (i + 0.5) / q;
      double u = 0.0;
      for (int n = 1; n <= modes; ++n) u += std::numbers::sqrt2 * std::sin(n * pi * xq) / n;
      integral += u / q;
    }
    CHECK(m.path_integral_functional(p) == doctest::Approx(integral).epsilon(1e-6));
  }

  TEST_CASE("no observations reduce the weights to one") {
    SpdeConfig c;
    c.obs_times = 0;
    const SpdeModel m(c);
    RandomStream rng(2);
    const auto cv = sample_coupled(m, MultiIndex{1, 2}, rng);
    RandomStream replay(2);
    const auto d = m.make_driver(MultiIndex{1, 2}, replay);
    for (std::size_t k = 0; k < cv.corners.size(); ++k) {
      CHECK(cv.value(k)[1] == 1.0);
      CHECK(cv.value(k)[0] == m.path_integral_functional(m.exponential_euler_path(cv.corners[k].index, d)));
    }
  }

  TEST_CASE("data generation") {
    const SpdeModel m;
    RandomStream a(77), b(77);
    const auto d1 = m.generate_truth_and_data(a);
    const auto d2 = m.generate_truth_and_data(b);
    CHECK(d1.values == d2.values);
    CHECK(d1.truth_integral == d2.truth_integral);
    CHECK(d1.values.size() == 12);

    // Without dynamics noise the data scatter around the deterministic field.
    SpdeConfig c;
    c.mode_variance = 0.0;
    c.obs_times = 40;
    c.obs_locations = 25;
    const SpdeModel quiet(c);
    RandomStream r(4);
    const auto data = quiet.generate_truth_and_data(r);
    RandomStream unused(0);
    const auto path = quiet.exponential_euler_path(c.master(), quiet.make_driver(c.master(), unused));
    umimc::testing::Moments resid;
    const auto locs = quiet.observation_locations();
    for (int k = 0; k < c.obs_times; ++k)
      for (std::size_t l = 0; l < locs.size(); ++l)
        resid.add(data.values[static_cast<std::size_t>(k) * locs.size() + l] - quiet.field_at(path, k, locs[l]));
    CHECK(std::abs(resid.mean()) < 4 * 0.025 / std::sqrt(1000.0));
    CHECK(std::sqrt(resid.variance()) == doctest::Approx(0.025).epsilon(0.1));
  }

  TEST_CASE("weights are positive and finite") {
    SpdeModel m;
    RandomStream g(8);
    m.set_observations(m.generate_truth_and_data(g));
    RandomStream rng(9);
    for (const auto& a : IndexBox(MultiIndex{3, 3}).enumerate()) {
      const auto cv = sample_coupled(m, a, rng);
      for (std::size_t k = 0; k < cv.corners.size(); ++k) {
        CHECK(std::isfinite(cv.value(k)[1]));
        CHECK(cv.value(k)[1] > 0.0);
      }
    }
    SpdeObservations wrong;
    wrong.times = 2;
    wrong.locations = 4;
    wrong.values.assign(8, 0.0);
    CHECK_THROWS_AS(m.set_observations(wrong), std::invalid_argument);
  }

  TEST_CASE("smoothing ratio") {
    CHECK(smoothing_ratio(std::vector<double>{0.3, 0.6}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(smoothing_ratio(std::vector<double>{0.3, 0.0}), std::domain_error);
    const auto w = smoothing_weights(std::vector<double>{0.3, 0.6});
    CHECK(w[0] == 1.0);
    CHECK(w[1] == doctest::Approx(-0.5));
  }

  TEST_CASE("ratio approaches the deterministic value when dynamics noise vanishes") {
    SpdeConfig c;
    c.mode_variance = 1e-12;
    c.alpha_max = MultiIndex{2, 2};
    SpdeModel m(c);
    RandomStream g(3);
    m.set_observations(m.generate_truth_and_data(g));
    AdaptiveOptions opt;
    opt.kind = EstimatorKind::DiagonalCoupled;
    opt.cap = 2;
    opt.budget = 2000.0;
    opt.adapt = false;
    opt.initial_tail = TailDistribution::diagonal_geometric(2, 0.5);
    RandomStream rng(4);
    const auto run = run_adaptive(m, opt, rng);
    RandomStream unused(0);
    const auto det = m.exponential_euler_path(MultiIndex{2, 2}, m.make_driver(MultiIndex{2, 2}, unused));
    CHECK(smoothing_ratio(run.state.estimate()) ==
          doctest::Approx(m.path_integral_functional(det)).epsilon(1e-4));
  }

  TEST_CASE("one-dimensional reduction without data") {
    SpdeConfig c;
    c.obs_times = 0;
    const SpdeModel m(c);
    AdaptiveOptions opt;
    opt.cap = 2;
    opt.budget = 3000.0;
    opt.adapt = false;
    opt.initial_tail = TailDistribution::diagonal_geometric(2, 0.5);
    RandomStream rng(6);
    const auto run = run_adaptive(m, opt, rng);
    const auto est = run.state.estimate();
    CHECK(est[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(smoothing_ratio(est) == doctest::Approx(est[0]).epsilon(1e-12));
  }
}
