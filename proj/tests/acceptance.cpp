// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fairsmile/marketdata.hpp"
#include "fairsmile/pricing.hpp"
#include "fairsmile/rng.hpp"

using namespace fairsmile;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fails: " << what << "]";
    }
  }
};

std::string fmt(double x, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

double combined(double a, double b) { return std::hypot(a, b); }

using Clock = std::chrono::steady_clock;

bool run_criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0.0) o.require(secs < budget_s, "runtime over " + fmt(budget_s, 0) + " s");
  std::printf("[%s] criterion %d: %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
              o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

// Bootstrap se of S/6 and kappa/24 of a standardized sample.
std::vector<double> moment_ses(const SampleSet& s, std::uint64_t seed) {
  BootstrapOptions b;
  b.seed = seed;
  return bootstrap_se(
      [](std::span<const double> r) {
        const auto m = compute_moments(r);
        return std::vector<double>{m.skewness / 6.0, m.excess_kurtosis / 24.0};
      },
      s.values(), b);
}

void gaussian_closure(Outcome& o) {
  const auto e = simulate_gaussian(0.01, 20, 100000, 11);
  const auto c = smile_via_exotics(e, KernelConfig{}, HedgeConfig{});
  o.detail << " alpha=" << fmt(c.alpha) << " beta=" << fmt(c.beta) << " gamma=" << fmt(c.gamma);
  o.require(std::abs(c.alpha - 1.0) <= 0.01, "alpha");
  o.require(std::abs(c.beta) <= 0.01, "beta");
  o.require(std::abs(c.gamma) <= 0.02, "gamma");
}

void implied_vol_round_trip(Outcome& o) {
  double worst_bachelier = 0.0, worst_bs = 0.0;
  for (double sigma : {0.02, 0.05, 0.1, 0.2, 0.3, 0.5}) {
    for (double m = -1.5; m <= 1.5 + 1e-12; m += 0.25) {
      const double kb = 1.0 + m * sigma;
      const double pb = bachelier_call(1.0, kb, sigma, 1.0);
      worst_bachelier = std::max(worst_bachelier, std::abs(sigma - bachelier_implied_vol(pb, 1.0, kb, 1.0)));
      const double ks = std::exp(m * sigma);
      const double ps = black_scholes_call(1.0, ks, sigma, 1.0);
      worst_bs = std::max(worst_bs, std::abs(sigma - black_scholes_implied_vol(ps, 1.0, ks, 1.0)));
    }
  }
  o.detail << " max_err bachelier=" << worst_bachelier << " black_scholes=" << worst_bs;
  o.require(worst_bachelier < 1e-8, "bachelier");
  o.require(worst_bs < 1e-8, "black-scholes");
}

void oracle_equivalence(Outcome& o) {
  const std::pair<const char*, PathEnsemble> models[] = {
      {"gaarch", simulate_gaarch(GaarchParams{0.01, 0.9, 0.1}, 20, 100000, 21)},
      {"nonlinear", simulate_nonlinear_leverage(NonlinearLeverageParams{0.01, 0.1, 0.0, 0.1}, 20, 100000, 22)},
  };
  double worst = 0.0;
  for (const auto& [name, e] : models) {
    for (std::size_t t : {5u, 10u, 20u}) {
      const auto ex = smile_via_exotics(e, KernelConfig{}, HedgeConfig{}, t);
      const auto fit = fit_smile_quadratic(smile_from_paths(e, kDefaultFitGrid, HedgeConfig{}, t));
      const double z[3] = {std::abs(ex.alpha - fit.alpha) / combined(ex.alpha_se, fit.alpha_se),
                           std::abs(ex.beta - fit.beta) / combined(ex.beta_se, fit.beta_se),
                           std::abs(ex.gamma - fit.gamma) / combined(ex.gamma_se, fit.gamma_se)};
      const char* coef[3] = {"alpha", "beta", "gamma"};
      for (int i = 0; i < 3; ++i) {
        worst = std::max(worst, z[i]);
        o.require(z[i] <= 2.0, std::string(name) + " T=" + std::to_string(t) + " " + coef[i] +
                                   " at " + fmt(z[i], 2) + " se");
      }
    }
  }
  o.detail << " largest gap " << fmt(worst, 2) << " combined se";
}

void gaarch_orderings(Outcome& o) {
  const auto full = simulate_gaarch(GaarchParams{0.01, 0.9, 0.1}, 20, 400000, 31);
  const auto high = select_regime(full, Regime::high_vol);
  o.detail << " paths=" << high.n_paths;
  for (std::size_t t = 1; t <= 20; ++t) {
    const auto m = compute_moments(ensemble_samples(high, t));
    const auto c = smile_via_exotics(high, KernelConfig{}, HedgeConfig{}, t);
    const double s6 = std::abs(m.skewness) / 6.0;
    const double k24 = m.excess_kurtosis / 24.0;
    if (t == 1 || t == 3 || t == 10 || t == 20) {
      o.detail << " | T=" << t << " |S|/6=" << fmt(s6) << " beta=" << fmt(c.beta)
               << " k/24=" << fmt(k24) << " gamma=" << fmt(c.gamma);
    }
    if (t < 3) continue;
    const std::string at = " T=" + std::to_string(t);
    o.require(s6 > std::abs(c.beta), "|S|/6 > |beta|" + at);
    o.require(c.beta < 0.0, "beta < 0" + at);
    o.require(k24 > c.gamma, "kappa/24 > gamma" + at);
    o.require(c.gamma > 0.0, "gamma > 0" + at);
  }
}

struct ThetaGap {
  double gap = 0.0;  // |beta| - |S|/6
  double se = 0.0;
  double signed_diff = 0.0;  // beta - S/6
};

ThetaGap theta_gap(const NonlinearLeverageParams& p, std::size_t paths, std::uint64_t seed) {
  const auto e = simulate_nonlinear_leverage(p, 10, paths, seed);
  const auto c = smile_via_exotics(e, KernelConfig{}, HedgeConfig{}, 10);
  const auto s = ensemble_samples(e, 10);
  const auto m = compute_moments(s);
  const auto se = moment_ses(s, seed);
  ThetaGap g;
  g.gap = std::abs(c.beta) - std::abs(m.skewness) / 6.0;
  g.signed_diff = c.beta - m.skewness / 6.0;
  g.se = combined(c.beta_se, se[0]);
  return g;
}

void theta_ordering(Outcome& o) {
  const ThetaGap zero = theta_gap({0.01, 0.1, 0.0, 0.1}, 100000, 41);
  const ThetaGap plus = theta_gap({0.01, 0.1, 0.5, 0.1}, 100000, 42);
  const ThetaGap minus = theta_gap({0.01, 0.1, -0.5, 0.1}, 100000, 43);
  o.detail << " theta=0: beta-S/6=" << fmt(zero.signed_diff) << " | theta=+0.5: |beta|-|S|/6="
           << fmt(plus.gap) << " | theta=-0.5: " << fmt(minus.gap) << " | se~" << fmt(zero.se);
  o.require(std::abs(zero.signed_diff) <= 2.0 * zero.se, "theta=0 beta vs S/6");
  o.require(plus.gap <= -2.0 * plus.se, "theta=+0.5 |beta| below |S|/6 by 2 se");
  o.require(minus.gap >= 2.0 * minus.se, "theta=-0.5 |beta| above |S|/6 by 2 se");
}

// Non-gating: the same ordering with a stronger, faster leverage effect.
void theta_diagnostic() {
  const auto t0 = Clock::now();
  std::printf("[INFO] criterion 5 diagnostic (epsilon=0.5, omega=0.5, 1e6 paths):");
  for (double theta : {0.5, 0.0, -0.5}) {
    const auto g = theta_gap({0.01, 0.5, theta, 0.5}, 1000000, 44);
    std::printf(" theta=%+.1f |beta|-|S|/6=%+.4f (se %.4f);", theta, g.gap, g.se);
  }
  std::printf(" %.1f s\n", std::chrono::duration<double>(Clock::now() - t0).count());
  std::fflush(stdout);
}

void variance_reduction(Outcome& o) {
  const auto e = simulate_gaussian(0.01, 20, 100000, 51);
  HedgeConfig off;
  off.enabled = false;
  const auto hedged = hedged_price(e, ExoticPayoff::straddle(), HedgeConfig{});
  const auto plain = hedged_price(e, ExoticPayoff::straddle(), off);
  const double gap = std::abs(hedged.value - plain.value);
  const double se = combined(hedged.std_error, plain.std_error);
  o.detail << " variance_ratio=" << fmt(hedged.variance_ratio) << " hedged=" << fmt(hedged.value)
           << " unhedged=" << fmt(plain.value) << " gap=" << fmt(gap / se, 2) << " se";
  o.require(hedged.variance_ratio < 0.5, "variance ratio");
  o.require(gap <= 2.0 * se, "hedged vs unhedged");
}

void edgeworth_regime(Outcome& o) {
  const auto e = simulate_gaarch(GaarchParams{0.01, 0.9, 0.02}, 10, 100000, 61);
  const auto s = ensemble_samples(e, 10);
  const auto k = default_kernel_config(s.size());
  BootstrapOptions b;
  b.seed = 62;
  const auto diffs = [&k](std::span<const double> r) {
    const auto u = standardize(r, 10);
    const auto m = compute_moments(u);
    const double beta = beta_hat(u);
    return std::vector<double>{beta - m.skewness / 6.0, gamma_hat(u, k) - m.excess_kurtosis / 24.0,
                               beta + m.median};
  };
  const auto d = diffs(s.values());
  const auto se = bootstrap_se(diffs, s.values(), b);
  const char* names[3] = {"beta - S/6", "gamma - kappa/24", "beta + M_T"};
  for (int i = 0; i < 3; ++i) {
    o.detail << " " << names[i] << "=" << fmt(d[i]) << " (se " << fmt(se[i]) << ")";
    o.require(std::abs(d[i]) <= 3.0 * se[i], names[i]);
  }
}

std::vector<OhlcBar> random_valid_bars(std::size_t n, std::uint64_t seed) {
  CounterStream rng(seed, 0, StreamDomain::fixtures);
  std::vector<OhlcBar> bars(n);
  const std::chrono::sys_days epoch{std::chrono::year{2000} / 1 / 1};
  for (std::size_t i = 0; i < n; ++i) {
    auto& b = bars[i];
    b.date = std::chrono::year_month_day{epoch + std::chrono::days{static_cast<int>(i)}};
    b.open = 50.0 + 100.0 * rng.uniform();
    b.close = b.open * std::exp(0.03 * rng.normal());
    b.high = std::max(b.open, b.close) * (1.0 + 0.02 * rng.uniform());
    b.low = std::min(b.open, b.close) * (1.0 - 0.02 * rng.uniform());
  }
  return bars;
}

void market_pipeline(Outcome& o) {
  // Synthetic Gaussian closes, daily vol 0.1%.
  CounterStream rng(71, 0, StreamDomain::fixtures);
  std::vector<double> r(200000);
  for (auto& x : r) x = 0.001 * rng.normal();
  const auto series = make_series(synthesize_ohlc(r, 100.0, 0.001, 72));
  for (Regime regime : {Regime::high_vol, Regime::low_vol}) {
    const auto s = build_return_windows(series, 1, regime);
    const auto c = estimate_smile(s, default_kernel_config(s.size()), BootstrapOptions{});
    const std::string tag(to_string(regime));
    o.detail << " " << tag << ": n=" << s.size() << " alpha=" << fmt(c.alpha) << " beta=" << fmt(c.beta)
             << " gamma=" << fmt(c.gamma) << ";";
    o.require(std::abs(c.alpha - 1.0) <= 0.01, tag + " alpha");
    o.require(std::abs(c.beta) <= 0.01, tag + " beta");
    o.require(std::abs(c.gamma) <= 0.02, tag + " gamma");
  }

  const auto bars = random_valid_bars(100000, 73);
  const bool rs_ok = std::all_of(bars.begin(), bars.end(), [](const OhlcBar& b) { return rogers_satchell(b) >= 0.0; });
  o.detail << " RS>=0 on " << bars.size() << " bars: " << (rs_ok ? "yes" : "no") << ";";
  o.require(rs_ok, "Rogers-Satchell sign");

  const auto split = make_series(std::vector<OhlcBar>(bars.begin(), bars.begin() + 5001));
  const auto hi = std::count(split.regimes.high.begin(), split.regimes.high.end(), true);
  const auto lo = std::count(split.regimes.low.begin(), split.regimes.low.end(), true);
  o.detail << " split high=" << hi << " low=" << lo << ";";
  o.require(std::abs(hi - lo) <= 1, "regime balance");

  // Changing bar t and later must leave the vol behind every label up to t.
  std::vector<OhlcBar> head(bars.begin(), bars.begin() + 3000);
  const auto base = make_series(head);
  bool causal = true;
  for (std::size_t t : {100u, 1500u, 2999u}) {
    auto mutated = head;
    for (std::size_t i = t; i < mutated.size(); ++i) {
      mutated[i].high *= 1.1;
      mutated[i].low *= 0.9;
    }
    const auto m = make_series(mutated);
    for (std::size_t i = 0; i <= t; ++i) {
      const bool nan_both = std::isnan(m.ema_vol[i]) && std::isnan(base.ema_vol[i]);
      causal = causal && (nan_both || m.ema_vol[i] == base.ema_vol[i]);
    }
  }
  o.detail << " causal=" << (causal ? "yes" : "no");
  o.require(causal, "causality");
}

}  // namespace

int main() {
  int failures = 0;
  auto tally = [&failures](bool ok) { failures += ok ? 0 : 1; };
  tally(run_criterion(1, "Gaussian closure", 30.0, gaussian_closure));
  tally(run_criterion(2, "implied-vol round trip", 1.0, implied_vol_round_trip));
  tally(run_criterion(3, "exotic estimators vs implied-vol fit", 300.0, oracle_equivalence));
  tally(run_criterion(4, "GAARCH high-vol orderings", 600.0, gaarch_orderings));
  tally(run_criterion(5, "nonlinear leverage theta ordering", 300.0, theta_ordering));
  theta_diagnostic();
  tally(run_criterion(6, "hedged straddle variance reduction", 0.0, variance_reduction));
  tally(run_criterion(7, "Edgeworth identities near Gaussian", 0.0, edgeworth_regime));
  tally(run_criterion(8, "synthetic market-data pipeline", 0.0, market_pipeline));
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
