#include "fairsmile/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairsmile/parallel.hpp"
#include "fairsmile/rng.hpp"

namespace fairsmile {

void validate(const PathEnsemble& e) {
  if (e.n_paths == 0 || e.n_steps == 0) throw Error("empty path ensemble");
  if (!(e.step_days > 0.0)) throw Error("step_days must be positive");
  if (e.returns.size() != e.n_paths * e.n_steps) throw Error("ensemble shape mismatch");
  if (!e.pre_vol.empty() && e.pre_vol.size() != e.n_paths) {
    throw Error("pre_vol size does not match path count");
  }
  for (double r : e.returns) {
    if (!std::isfinite(r)) throw Error("non-finite return in ensemble");
  }
}

void validate(const NonlinearLeverageParams& p) {
  if (!(p.base_vol > 0.0)) throw Error("base_vol must be positive");
  if (!(p.epsilon >= 0.0)) throw Error("epsilon must be non-negative");
  if (!(p.omega > 0.0)) throw Error("omega must be positive");
  if (p.omega >= 1.0) throw Error("unstable discretization");
  if (!std::isfinite(p.theta)) throw Error("theta must be finite");
}

void validate(const GaarchParams& p) {
  if (!(p.base_vol > 0.0)) throw Error("base_vol must be positive");
  if (!(p.rho >= 0.0 && p.rho < 1.0)) throw Error("rho must lie in [0, 1)");
  if (!(p.nu >= 0.0)) throw Error("nu must be non-negative");
}

double instantaneous_variance(const NonlinearLeverageParams& p, double xi) noexcept {
  const double shifted = xi + p.theta;
  const double excess = shifted < 0.0 ? -shifted : 0.0;
  return p.base_vol * p.base_vol * (1.0 + 2.0 * p.epsilon * excess);
}

double next_gaarch_state(const GaarchParams& p, double chi, double eta) noexcept {
  const double shock = (eta < 0.0 ? eta * eta : 0.0) - 0.5;
  return p.rho * chi + p.nu * (1.0 + chi) * shock;
}

namespace {
constexpr std::size_t kEmaWindow = 20;
}

namespace {

// ceil that ignores rounding noise, so 10 / (1 - 0.9) gives 100.
std::size_t ceil_steps(double x) noexcept {
  return static_cast<std::size_t>(std::ceil(x * (1.0 - 1e-12)));
}

}  // namespace

std::size_t leverage_burn_in(const NonlinearLeverageParams& p) noexcept {
  return std::max(kEmaWindow, ceil_steps(10.0 / p.omega));
}

std::size_t gaarch_burn_in(const GaarchParams& p) noexcept {
  return std::max(kEmaWindow, ceil_steps(10.0 / (1.0 - p.rho)));
}

double trailing_ema_vol(std::span<const double> squared_returns, std::size_t window) {
  if (window == 0 || squared_returns.size() < window) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double v = 0.0;
  for (std::size_t i = 0; i < window; ++i) v += squared_returns[i];
  v /= static_cast<double>(window);
  const double lambda = 1.0 / static_cast<double>(window);
  for (std::size_t i = window; i < squared_returns.size(); ++i) {
    v = (1.0 - lambda) * v + lambda * squared_returns[i];
  }
  return std::sqrt(v);
}

namespace {

PathEnsemble allocate(std::size_t horizon, std::size_t n_paths, std::uint64_t seed,
                      std::string tag, bool with_pre_vol) {
  if (horizon == 0) throw Error("horizon must be at least one day");
  if (n_paths == 0) throw Error("n_paths must be at least one");
  PathEnsemble e;
  e.n_paths = n_paths;
  e.n_steps = horizon;
  e.returns.resize(n_paths * horizon);
  e.model_tag = std::move(tag);
  e.seed = seed;
  if (with_pre_vol) e.pre_vol.resize(n_paths);
  return e;
}

}  // namespace

PathEnsemble simulate_gaussian(double vol, std::size_t horizon_days, std::size_t n_paths,
                               std::uint64_t seed) {
  if (!(vol > 0.0)) throw Error("vol must be positive");
  auto e = allocate(horizon_days, n_paths, seed, "gaussian", false);
  const std::size_t n = horizon_days;
  double* out = e.returns.data();

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n_paths); ++p) {
    CounterStream rng(seed, static_cast<std::uint64_t>(p));
    double* row = out + static_cast<std::size_t>(p) * n;
    for (std::size_t t = 0; t < n; ++t) row[t] = vol * rng.normal();
  }
  return e;
}

PathEnsemble simulate_nonlinear_leverage(const NonlinearLeverageParams& params,
                                         std::size_t horizon_days, std::size_t n_paths,
                                         std::uint64_t seed) {
  validate(params);
  auto e = allocate(horizon_days, n_paths, seed, "nonlinear", true);
  const std::size_t burn = leverage_burn_in(params);
  const std::size_t n = horizon_days;
  double* out = e.returns.data();
  double* pre = e.pre_vol.data();

#pragma omp parallel
  {
    std::vector<double> burn_sq(burn);
#pragma omp for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n_paths); ++p) {
      CounterStream rng(seed, static_cast<std::uint64_t>(p));
      double xi = 0.0;
      for (std::size_t t = 0; t < burn; ++t) {
        const double dw = rng.normal();
        const double r = std::sqrt(instantaneous_variance(params, xi)) * dw;
        burn_sq[t] = r * r;
        xi = next_leverage_state(xi, dw, params.omega);
      }
      double* row = out + static_cast<std::size_t>(p) * n;
      for (std::size_t t = 0; t < n; ++t) {
        const double dw = rng.normal();
        row[t] = std::sqrt(instantaneous_variance(params, xi)) * dw;
        xi = next_leverage_state(xi, dw, params.omega);
      }
      pre[p] = trailing_ema_vol(burn_sq, kEmaWindow);
    }
  }
  return e;
}

PathEnsemble simulate_gaarch(const GaarchParams& params, std::size_t horizon_days,
                             std::size_t n_paths, std::uint64_t seed) {
  validate(params);
  auto e = allocate(horizon_days, n_paths, seed, "gaarch", true);
  const std::size_t burn = gaarch_burn_in(params);
  const std::size_t n = horizon_days;
  double* out = e.returns.data();
  double* pre = e.pre_vol.data();
  std::uint64_t floor_hits = 0;

#pragma omp parallel reduction(+ : floor_hits)
  {
    std::vector<double> burn_sq(burn);
#pragma omp for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n_paths); ++p) {
      CounterStream rng(seed, static_cast<std::uint64_t>(p));
      double chi = 0.0;
      double* row = out + static_cast<std::size_t>(p) * n;
      for (std::size_t t = 0; t < burn + n; ++t) {
        const double eta = rng.normal();
        if (1.0 + chi <= 0.0) ++floor_hits;
        const double r = gaarch_vol(params, chi) * eta;
        if (t < burn) {
          burn_sq[t] = r * r;
        } else {
          row[t - burn] = r;
        }
        chi = next_gaarch_state(params, chi, eta);
      }
      pre[p] = trailing_ema_vol(burn_sq, kEmaWindow);
    }
  }
  e.vol_floor_hits = floor_hits;
  return e;
}

std::vector<double> terminal_returns(const PathEnsemble& e, std::size_t horizon) {
  if (horizon == 0 || horizon > e.n_steps) throw Error("mismatched horizon");
  std::vector<double> r(e.n_paths);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(e.n_paths); ++p) {
    const auto row = e.row(static_cast<std::size_t>(p));
    double s = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) s += row[t];
    r[static_cast<std::size_t>(p)] = s;
  }
  return r;
}

PathEnsemble select_regime(const PathEnsemble& e, Regime regime) {
  if (regime == Regime::all) return e;
  if (e.pre_vol.size() != e.n_paths) {
    throw Error("ensemble '" + e.model_tag + "' has no pre-window vol for regime selection");
  }
  const auto masks = median_split(e.pre_vol);
  const auto& keep = masks.mask(regime);

  PathEnsemble out;
  out.n_steps = e.n_steps;
  out.step_days = e.step_days;
  out.model_tag = e.model_tag + ":" + std::string(to_string(regime));
  out.seed = e.seed;
  out.vol_floor_hits = e.vol_floor_hits;
  for (std::size_t p = 0; p < e.n_paths; ++p) {
    if (!keep[p]) continue;
    const auto row = e.row(p);
    out.returns.insert(out.returns.end(), row.begin(), row.end());
    out.pre_vol.push_back(e.pre_vol[p]);
    ++out.n_paths;
  }
  if (out.n_paths == 0) throw Error("regime selection left no paths");
  return out;
}

SampleSet ensemble_samples(const PathEnsemble& e, std::size_t horizon, Regime regime) {
  if (regime != Regime::all) {
    const auto sub = select_regime(e, regime);
    return standardize(terminal_returns(sub, horizon), static_cast<int>(horizon), regime,
                       sub.model_tag);
  }
  return standardize(terminal_returns(e, horizon), static_cast<int>(horizon), regime,
                     e.model_tag);
}

}  // namespace fairsmile
