#include "fairsmile/pricing.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairsmile/normal.hpp"

namespace fairsmile {

namespace {

void require_positive_time(double t) {
  if (!(t > 0.0)) throw Error("time to expiry must be positive");
}

// Safeguarded Newton on a price that is increasing in vol. `lo` must price
// below the target.
template <class Price, class Vega>
double solve_increasing(double target, Price price, Vega vega, double guess) {
  double lo = 0.0;
  double hi = std::max(guess, 1e-8);
  while (price(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw Error("implied vol search diverged");
  }
  double x = std::clamp(guess, lo, hi);
  if (!(x > lo)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = price(x) - target;
    if (f == 0.0) return x;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double slope = vega(x);
    double next = slope > 0.0 ? x - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

double bachelier_call(double s0, double strike, double vol_abs, double t) {
  require_positive_time(t);
  if (vol_abs < 0.0) throw Error("vol must be non-negative");
  const double sd = vol_abs * std::sqrt(t);
  if (sd == 0.0) return std::max(s0 - strike, 0.0);
  const double d = (s0 - strike) / sd;
  return (s0 - strike) * norm_cdf(d) + sd * norm_pdf(d);
}

double bachelier_vega(double s0, double strike, double vol_abs, double t) {
  require_positive_time(t);
  const double sd = vol_abs * std::sqrt(t);
  if (!(sd > 0.0)) return 0.0;
  return std::sqrt(t) * norm_pdf((s0 - strike) / sd);
}

double bachelier_implied_vol(double price, double s0, double strike, double t) {
  require_positive_time(t);
  const double intrinsic = std::max(s0 - strike, 0.0);
  if (!std::isfinite(price) || !(price > intrinsic)) throw Error("no-arbitrage violation");
  const double guess = std::max(price - intrinsic, price) * kSqrt2Pi / std::sqrt(t);
  return solve_increasing(
      price, [&](double v) { return bachelier_call(s0, strike, v, t); },
      [&](double v) { return bachelier_vega(s0, strike, v, t); }, guess);
}

double black_scholes_call(double s0, double strike, double vol_rel, double t) {
  require_positive_time(t);
  if (!(s0 > 0.0) || !(strike > 0.0)) throw Error("Black-Scholes needs positive spot and strike");
  if (vol_rel < 0.0) throw Error("vol must be non-negative");
  const double sd = vol_rel * std::sqrt(t);
  if (sd == 0.0) return std::max(s0 - strike, 0.0);
  const double d1 = (std::log(s0 / strike) + 0.5 * sd * sd) / sd;
  const double d2 = d1 - sd;
  return s0 * norm_cdf(d1) - strike * norm_cdf(d2);
}

double black_scholes_vega(double s0, double strike, double vol_rel, double t) {
  require_positive_time(t);
  const double sd = vol_rel * std::sqrt(t);
  if (!(sd > 0.0)) return 0.0;
  const double d1 = (std::log(s0 / strike) + 0.5 * sd * sd) / sd;
  return s0 * std::sqrt(t) * norm_pdf(d1);
}

double black_scholes_implied_vol(double price, double s0, double strike, double t) {
  require_positive_time(t);
  const double intrinsic = std::max(s0 - strike, 0.0);
  if (!std::isfinite(price) || !(price > intrinsic) || !(price < s0)) {
    throw Error("no-arbitrage violation");
  }
  const double guess = price / s0 * kSqrt2Pi / std::sqrt(t);
  return solve_increasing(
      price, [&](double v) { return black_scholes_call(s0, strike, v, t); },
      [&](double v) { return black_scholes_vega(s0, strike, v, t); }, guess);
}

SmileCurve smile_from_paths(const PathEnsemble& e, std::span<const double> moneyness_grid,
                            const HedgeConfig& h, std::size_t horizon) {
  if (moneyness_grid.empty()) throw Error("empty moneyness grid");
  for (double m : moneyness_grid) {
    if (!(std::abs(m) <= 1.5)) throw Error("moneyness outside the expansion region |M| <= 1.5");
  }
  std::vector<ExoticPayoff> calls;
  for (double m : moneyness_grid) calls.push_back(ExoticPayoff::vanilla_call(m));
  const auto values = hedged_path_values(e, calls, h, horizon);

  SmileCurve curve;
  curve.base_vol = values.terminal_std;
  curve.n_paths = values.n_paths;
  curve.influence.resize(values.n_paths * calls.size());
  const double s0 = 1.0;
  for (std::size_t j = 0; j < calls.size(); ++j) {
    const auto est = summarize(values, j, h.enabled);
    SmilePoint pt;
    pt.moneyness = moneyness_grid[j];
    pt.price = est.value * curve.base_vol * s0;
    pt.price_se = est.std_error * curve.base_vol * s0;
    const double strike = s0 * (1.0 + pt.moneyness * curve.base_vol);
    const double vol_abs = bachelier_implied_vol(pt.price, s0, strike, 1.0);
    pt.implied_vol = vol_abs / s0;
    const double vega = bachelier_vega(s0, strike, vol_abs, 1.0);
    pt.implied_vol_se = pt.price_se / vega / s0;
    curve.points.push_back(pt);
    // Prices and vols scale together with base_vol, so implied_vol / base_vol
    // moves by the standardized price influence over the vega.
    const auto infl = influence(values, j, h.enabled);
    for (std::size_t p = 0; p < values.n_paths; ++p) {
      curve.influence[p * calls.size() + j] = infl[p] / vega;
    }
  }
  return curve;
}

namespace {

SmileCoefficients fit_quadratic(std::span<const SmilePoint> points, double base_vol,
                                std::span<const double> influence, std::size_t n_paths) {
  if (!(base_vol > 0.0)) throw Error("base vol must be positive");
  if (points.size() < 4) throw Error("quadratic smile fit needs at least 4 points");
  const auto [lo, hi] = std::minmax_element(
      points.begin(), points.end(),
      [](const SmilePoint& a, const SmilePoint& b) { return a.moneyness < b.moneyness; });
  if (!(lo->moneyness <= 0.0 && hi->moneyness >= 0.0)) {
    throw Error("quadratic smile fit grid must span M = 0");
  }

  const bool weighted = std::all_of(points.begin(), points.end(),
                                    [](const SmilePoint& p) { return p.implied_vol_se > 0.0; });
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    const double w = weighted ? base_vol / p.implied_vol_se : 1.0;
    x(i, 0) = w;
    x(i, 1) = w * p.moneyness;
    x(i, 2) = w * p.moneyness * p.moneyness;
    y(i) = w * p.implied_vol / base_vol;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < 3) throw Error("rank-deficient smile grid");
  const Eigen::Vector3d coef = qr.solve(y);
  Eigen::Matrix3d cov = (x.transpose() * x).inverse();
  if (n_paths > 1) {
    // Sandwich over paths: coefficients are a fixed linear map of the vols.
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& p = points[static_cast<std::size_t>(i)];
      w(i) = weighted ? base_vol / p.implied_vol_se : 1.0;
    }
    const Eigen::MatrixXd map = cov * x.transpose() * w.asDiagonal();
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        infl(influence.data(), static_cast<Eigen::Index>(n_paths), n);
    const Eigen::MatrixXd coef_infl = infl * map.transpose();
    const Eigen::RowVector3d centre = coef_infl.colwise().mean();
    const Eigen::MatrixXd centred = coef_infl.rowwise() - centre;
    const double np = static_cast<double>(n_paths);
    cov = centred.transpose() * centred / ((np - 1.0) * np);
  } else if (!weighted) {
    const double rss = (y - x * coef).squaredNorm();
    const double dof = static_cast<double>(n - 3);
    cov *= dof > 0.0 ? rss / dof : 0.0;
  }

  SmileCoefficients c;
  c.alpha = coef(0);
  c.beta = coef(1);
  c.gamma = coef(2);
  c.alpha_se = std::sqrt(std::max(cov(0, 0), 0.0));
  c.beta_se = std::sqrt(std::max(cov(1, 1), 0.0));
  c.gamma_se = std::sqrt(std::max(cov(2, 2), 0.0));
  c.method = SmileMethod::iv_fit;
  return c;
}

}  // namespace

SmileCoefficients fit_smile_quadratic(std::span<const SmilePoint> points, double base_vol) {
  return fit_quadratic(points, base_vol, {}, 0);
}

SmileCoefficients fit_smile_quadratic(const SmileCurve& curve) {
  if (curve.n_paths > 1 && curve.influence.size() != curve.n_paths * curve.points.size()) {
    throw Error("smile influence size mismatch");
  }
  return fit_quadratic(curve.points, curve.base_vol, curve.influence, curve.n_paths);
}

}  // namespace fairsmile
