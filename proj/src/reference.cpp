#include "fairsmile/reference.hpp"

#include <cmath>

#include "fairsmile/rng.hpp"

namespace fairsmile::reference {

namespace {

constexpr std::size_t kEmaWindow = 20;

// Simulates burn-in + horizon steps for every path, one path after another,
// and splits the result into recorded returns and the pre-window vol.
template <class Step>
PathEnsemble run(std::size_t burn, std::size_t horizon, std::size_t n_paths, std::uint64_t seed,
                 std::string tag, Step step) {
  if (horizon == 0 || n_paths == 0) throw Error("empty ensemble requested");
  PathEnsemble e;
  e.n_paths = n_paths;
  e.n_steps = horizon;
  e.model_tag = std::move(tag);
  e.seed = seed;
  for (std::size_t p = 0; p < n_paths; ++p) {
    CounterStream rng(seed, p);
    std::vector<double> full;
    auto state = step.initial();
    for (std::size_t t = 0; t < burn + horizon; ++t) full.push_back(step(state, rng.normal(), e));
    e.returns.insert(e.returns.end(), full.begin() + static_cast<std::ptrdiff_t>(burn), full.end());
    if (burn > 0) {
      std::vector<double> sq;
      for (std::size_t t = 0; t < burn; ++t) sq.push_back(full[t] * full[t]);
      e.pre_vol.push_back(trailing_ema_vol(sq, kEmaWindow));
    }
  }
  return e;
}

}  // namespace

PathEnsemble simulate_gaussian(double vol, std::size_t horizon_days, std::size_t n_paths,
                               std::uint64_t seed) {
  if (!(vol > 0.0)) throw Error("vol must be positive");
  struct Step {
    double vol;
    int initial() const { return 0; }
    double operator()(int&, double z, PathEnsemble&) const { return vol * z; }
  };
  return run(0, horizon_days, n_paths, seed, "gaussian", Step{vol});
}

PathEnsemble simulate_nonlinear_leverage(const NonlinearLeverageParams& p, std::size_t horizon_days,
                                         std::size_t n_paths, std::uint64_t seed) {
  validate(p);
  struct Step {
    NonlinearLeverageParams p;
    double initial() const { return 0.0; }
    double operator()(double& xi, double dw, PathEnsemble&) const {
      const double r = std::sqrt(instantaneous_variance(p, xi)) * dw;
      xi = next_leverage_state(xi, dw, p.omega);
      return r;
    }
  };
  return run(leverage_burn_in(p), horizon_days, n_paths, seed, "nonlinear", Step{p});
}

PathEnsemble simulate_gaarch(const GaarchParams& p, std::size_t horizon_days, std::size_t n_paths,
                             std::uint64_t seed) {
  validate(p);
  struct Step {
    GaarchParams p;
    double initial() const { return 0.0; }
    double operator()(double& chi, double eta, PathEnsemble& e) const {
      if (1.0 + chi <= 0.0) ++e.vol_floor_hits;
      const double r = gaarch_vol(p, chi) * eta;
      chi = next_gaarch_state(p, chi, eta);
      return r;
    }
  };
  return run(gaarch_burn_in(p), horizon_days, n_paths, seed, "gaarch", Step{p});
}

std::vector<double> kernel_density_profile(std::span<const double> u,
                                           std::span<const double> deltas) {
  std::vector<double> out;
  for (double d : deltas) {
    double s = 0.0;
    for (double x : u) s += std::exp(-x * x / (2.0 * d * d)) / std::sqrt(2.0 * M_PI * d * d);
    out.push_back(s / static_cast<double>(u.size()));
  }
  return out;
}

PriceEstimate hedged_price(const PathEnsemble& e, const ExoticPayoff& payoff, const HedgeConfig& h,
                           std::size_t horizon) {
  if (horizon == 0) horizon = e.n_steps;
  if (horizon > e.n_steps) throw Error("mismatched horizon");
  const std::size_t n = e.n_paths;

  std::vector<double> terminal(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t t = 0; t < horizon; ++t) terminal[p] += e.returns[p * e.n_steps + t];
  }
  double mean = 0.0;
  for (double r : terminal) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double r : terminal) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  const double var_scale =
      h.hedge_vol ? *h.hedge_vol * *h.hedge_vol * static_cast<double>(horizon) * e.step_days / (sd * sd)
                  : 1.0;

  std::vector<double> plain(n), hedged(n), u(n);
  double delta_mean = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    // Standardized running return; x[T] is the terminal u.
    std::vector<double> x(horizon + 1, 0.0);
    for (std::size_t t = 0; t < horizon; ++t) {
      x[t + 1] = x[t] + (e.returns[p * e.n_steps + t] - mean / static_cast<double>(horizon)) / sd;
    }
    double pnl = 0.0;
    double delta = 0.0;
    for (std::size_t t = 0; t < horizon && h.enabled; ++t) {
      if (t % h.rebalance_every == 0) {
        const double v = var_scale * static_cast<double>(horizon - t) / static_cast<double>(horizon);
        delta = gaussian_hedge_delta(payoff, x[t], v);
      }
      pnl += delta * (x[t + 1] - x[t]);
      delta_mean += delta / static_cast<double>(horizon * n);
    }
    u[p] = (terminal[p] - mean) / sd;
    plain[p] = payoff(u[p]);
    hedged[p] = plain[p] - pnl;
  }

  auto stats = [n](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(n);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, s / static_cast<double>(n - 1)};
  };
  const auto [m_plain, v_plain] = stats(plain);
  const auto [m_hedged, v_hedged] = stats(hedged);
  PriceEstimate out;
  out.n_paths = n;
  out.value = h.enabled ? m_hedged : m_plain;
  const double v_used = h.enabled ? v_hedged : v_plain;

  // Standardization error: slopes of the price in the sample mean and std.
  const double bw = 1.06 * std::pow(static_cast<double>(n), -0.2);
  double slope = 0.0, u_slope = 0.0;
  for (double x : u) {
    double d = 0.0;
    switch (payoff.kind) {
      case ExoticPayoff::Kind::straddle: d = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); break;
      case ExoticPayoff::Kind::binary: d = std::exp(-0.5 * x * x / (bw * bw)) / (bw * std::sqrt(2.0 * M_PI)); break;
      case ExoticPayoff::Kind::gaussian_window: d = -x / (payoff.parameter * payoff.parameter) * payoff(x); break;
      case ExoticPayoff::Kind::vanilla_call: d = x > payoff.parameter ? 1.0 : 0.0; break;
      case ExoticPayoff::Kind::constant: break;
    }
    slope += d / static_cast<double>(n);
    if (payoff.kind != ExoticPayoff::Kind::binary) u_slope += x * d / static_cast<double>(n);
  }
  const double drift = slope - (h.enabled ? delta_mean : 0.0);
  const auto& used = h.enabled ? hedged : plain;
  const double m_used = h.enabled ? m_hedged : m_plain;
  std::vector<double> infl(n);
  for (std::size_t p = 0; p < n; ++p) {
    infl[p] = used[p] - m_used - drift * u[p] - 0.5 * u_slope * (u[p] * u[p] - 1.0);
  }
  out.std_error = std::sqrt(stats(infl).second / static_cast<double>(n));
  out.variance_ratio = v_plain > 0.0 ? v_used / v_plain : 1.0;
  return out;
}

double bootstrap_se(const Estimator& estimator, std::span<const double> samples,
                    const BootstrapOptions& options) {
  std::vector<double> draws;
  std::vector<double> resample;
  for (int b = 0; b < options.n_boot; ++b) {
    bootstrap_resample(samples, options, static_cast<std::uint64_t>(b), resample);
    draws.push_back(estimator(resample));
  }
  double m = 0.0;
  for (double d : draws) m += d;
  m /= static_cast<double>(draws.size());
  double s = 0.0;
  for (double d : draws) s += (d - m) * (d - m);
  return std::sqrt(s / static_cast<double>(draws.size() - 1));
}

}  // namespace fairsmile::reference
