#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairsmile/normal.hpp"
#include "fairsmile/pricing.hpp"

using namespace fairsmile;

TEST_CASE("bachelier prices") {
  CHECK(bachelier_call(100, 100, 20, 1) == doctest::Approx(20 * kInvSqrt2Pi));
  CHECK(bachelier_call(100, -1e6, 20, 1) == doctest::Approx(100 + 1e6));
  CHECK(bachelier_call(100, 110, 0, 1) == 0.0);
  CHECK(bachelier_call(100, 110, 1e-12, 1) == doctest::Approx(0.0));
  // Decreasing and convex in strike.
  double prev = 1e300, prev_slope = -1e300;
  for (double k = 60; k <= 140; k += 2.5) {
    const double c = bachelier_call(100, k, 15, 1);
    CHECK(c < prev);
    if (prev < 1e300) {
      const double slope = c - prev;
      CHECK(slope >= prev_slope - 1e-12);
      prev_slope = slope;
    }
    prev = c;
  }
}

TEST_CASE("bachelier implied vol round trip") {
  CHECK(bachelier_implied_vol(20 * kInvSqrt2Pi, 100, 100, 1) == doctest::Approx(20).epsilon(1e-12));
  double worst = 0.0;
  for (double vol : {5.0, 10.0, 20.0, 40.0}) {
    for (double m = -2.0; m <= 2.0001; m += 0.25) {
      const double k = 100 + m * vol;
      const double iv = bachelier_implied_vol(bachelier_call(100, k, vol, 1), 100, k, 1);
      worst = std::max(worst, std::abs(iv - vol));
    }
  }
  CHECK(worst < 1e-8);
  CHECK_THROWS_WITH(bachelier_implied_vol(5.0, 105, 100, 1), "no-arbitrage violation");
  CHECK_THROWS_WITH(bachelier_implied_vol(0.0, 100, 100, 1), "no-arbitrage violation");
}

TEST_CASE("black-scholes prices and implied vols") {
  CHECK(black_scholes_call(1, 1, 0.2, 1) == doctest::Approx(2 * norm_cdf(0.1) - 1));
  CHECK(black_scholes_call(1, 1, 0.2, 1) == doctest::Approx(0.0797).epsilon(1e-3));
  double worst = 0.0;
  for (double vol : {0.05, 0.1, 0.2, 0.4}) {
    for (double m = -2.0; m <= 2.0001; m += 0.25) {
      const double k = 100 * (1 + m * vol);
      const double iv = black_scholes_implied_vol(black_scholes_call(100, k, vol, 1), 100, k, 1);
      worst = std::max(worst, std::abs(iv - vol));
    }
  }
  CHECK(worst < 1e-8);
  CHECK_THROWS_WITH(black_scholes_implied_vol(100.0, 100, 90, 1), "no-arbitrage violation");
}

TEST_CASE("bachelier and black-scholes agree for small vol") {
  const double s0 = 100, vol = 0.01;
  for (double m = -1.0; m <= 1.0001; m += 0.25) {
    const double k = s0 * (1 + m * vol);
    const double price = black_scholes_call(s0, k, vol, 1);
    const double bs = black_scholes_implied_vol(price, s0, k, 1);
    const double ba = bachelier_implied_vol(price, s0, k, 1) / s0;
    CHECK(std::abs(bs - ba) / bs < 0.01);
  }
}

TEST_CASE("quadratic smile fit") {
  std::vector<SmilePoint> pts;
  for (double m : kDefaultFitGrid) {
    SmilePoint p;
    p.moneyness = m;
    p.implied_vol = 0.2 * (1.0 + 0.1 * m + 0.02 * m * m);
    pts.push_back(p);
  }
  const auto c = fit_smile_quadratic(pts, 0.2);
  CHECK(std::abs(c.alpha - 1.0) < 1e-12);
  CHECK(std::abs(c.beta - 0.1) < 1e-12);
  CHECK(std::abs(c.gamma - 0.02) < 1e-12);
  CHECK(c.method == SmileMethod::iv_fit);

  for (auto& p : pts) p.implied_vol = 0.2;
  const auto flat = fit_smile_quadratic(pts, 0.2);
  CHECK(std::abs(flat.alpha - 1.0) < 1e-12);
  CHECK(std::abs(flat.beta) < 1e-12);
  CHECK(std::abs(flat.gamma) < 1e-12);

  std::vector<SmilePoint> too_few(pts.begin(), pts.begin() + 3);
  CHECK_THROWS(fit_smile_quadratic(too_few, 0.2));
  std::vector<SmilePoint> same(4, pts[3]);
  CHECK_THROWS_WITH(fit_smile_quadratic(same, 0.2), "rank-deficient smile grid");
}

TEST_CASE("smile from gaussian paths is flat") {
  const auto e = simulate_gaussian(0.01, 20, 100000, 3);
  const auto curve = smile_from_paths(e, kDefaultFitGrid, HedgeConfig{});
  REQUIRE(curve.points.size() == 7);
  for (const auto& p : curve.points) {
    CHECK(std::abs(p.implied_vol - curve.base_vol) < 2 * p.implied_vol_se);
  }
  const std::vector<double> atm{0.0};
  const auto one = smile_from_paths(e, atm, HedgeConfig{});
  const auto c = price_smile_exotics(e, KernelConfig{}, HedgeConfig{}).coefficients;
  CHECK(std::abs(one.points[0].implied_vol / one.base_vol - c.alpha) <
        2 * std::hypot(one.points[0].implied_vol_se / one.base_vol, c.alpha_se));
  const std::vector<double> wide{0.0, 2.0};
  CHECK_THROWS(smile_from_paths(e, wide, HedgeConfig{}));
}

TEST_CASE("GAARCH high-vol smile slopes down") {
  const auto e = select_regime(simulate_gaarch(GaarchParams{}, 10, 200000, 4), Regime::high_vol);
  const std::vector<double> grid{-0.5, 0.5};
  const auto curve = smile_from_paths(e, grid, HedgeConfig{});
  CHECK(curve.points[0].implied_vol > curve.points[1].implied_vol);
}

TEST_CASE("iv fit agrees with the exotic estimators on GAARCH paths") {
  const auto e = simulate_gaarch(GaarchParams{}, 10, 100000, 5);
  const auto curve = smile_from_paths(e, kDefaultFitGrid, HedgeConfig{});
  const auto fit = fit_smile_quadratic(curve);
  const auto ex = price_smile_exotics(e, KernelConfig{}, HedgeConfig{}).coefficients;
  CHECK(std::abs(fit.alpha - ex.alpha) <= 2 * std::hypot(fit.alpha_se, ex.alpha_se));
  CHECK(std::abs(fit.beta - ex.beta) <= 2 * std::hypot(fit.beta_se, ex.beta_se));
  CHECK(std::abs(fit.gamma - ex.gamma) <= 2 * std::hypot(fit.gamma_se, ex.gamma_se));
}
