#pragma once

#include <span>
#include <vector>

#include "fairsmile/hedge.hpp"

namespace fairsmile {

// Zero rates and dividends throughout.

[[nodiscard]] double bachelier_call(double s0, double strike, double vol_abs, double t);
// dC/dvol_abs
[[nodiscard]] double bachelier_vega(double s0, double strike, double vol_abs, double t);
// Inverts bachelier_call; throws "no-arbitrage violation" unless
// price > max(s0 - K, 0).
[[nodiscard]] double bachelier_implied_vol(double price, double s0, double strike, double t);

[[nodiscard]] double black_scholes_call(double s0, double strike, double vol_rel, double t);
[[nodiscard]] double black_scholes_vega(double s0, double strike, double vol_rel, double t);
// Valid band: max(s0 - K, 0) < price < s0.
[[nodiscard]] double black_scholes_implied_vol(double price, double s0, double strike, double t);

struct SmilePoint {
  double moneyness = 0.0;       // (K - S0) / (S0 sigma sqrt(T))
  double implied_vol = 0.0;     // Bachelier vol relative to S0, per sqrt(horizon)
  double implied_vol_se = 0.0;  // price_se / vega
  double price = 0.0;           // per unit S0
  double price_se = 0.0;
};

struct SmileCurve {
  double base_vol = 0.0;  // sigma sqrt(T): realized std of the horizon return
  std::vector<SmilePoint> points;
  // Per-path linearized implied_vol / base_vol, path-major over the points.
  std::size_t n_paths = 0;
  std::vector<double> influence;
};

inline constexpr double kDefaultFitGrid[] = {-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0};

// Prices calls K = S0 (1 + M sigma sqrt(T)) on the ensemble by hedged Monte
// Carlo (Bachelier delta) and inverts each price to a Bachelier implied vol.
[[nodiscard]] SmileCurve smile_from_paths(const PathEnsemble& e,
                                          std::span<const double> moneyness_grid,
                                          const HedgeConfig& h, std::size_t horizon = 0);

// Weighted least squares of implied_vol / base_vol on (1, M, M^2) with
// weights 1/se^2 (unweighted when any se is zero). Coefficient errors come
// from (X'WX)^-1 in the weighted case and from the residual variance
// otherwise.
[[nodiscard]] SmileCoefficients fit_smile_quadratic(std::span<const SmilePoint> points,
                                                    double base_vol);
// Same fit; coefficient errors come from the per-path influences, which keep
// the correlation between strikes priced on the same paths.
[[nodiscard]] SmileCoefficients fit_smile_quadratic(const SmileCurve& curve);

}  // namespace fairsmile
