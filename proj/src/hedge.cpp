#include "fairsmile/hedge.hpp"

#include <array>
#include <cmath>

#include "fairsmile/normal.hpp"
#include "fairsmile/parallel.hpp"

namespace fairsmile {

ExoticPayoff ExoticPayoff::gaussian_window(double width) {
  if (!(width > 0.0)) throw Error("gaussian window width must be positive");
  return {Kind::gaussian_window, width};
}

double ExoticPayoff::operator()(double u) const noexcept {
  switch (kind) {
    case Kind::straddle: return std::abs(u);
    case Kind::binary: return u > 0.0 ? 1.0 : (u == 0.0 ? 0.5 : 0.0);
    case Kind::gaussian_window: {
      const double w2 = parameter * parameter;
      return std::exp(-0.5 * u * u / w2) * kInvSqrt2Pi / parameter;
    }
    case Kind::vanilla_call: return u > parameter ? u - parameter : 0.0;
    case Kind::constant: return parameter;
  }
  return 0.0;
}

double ExoticPayoff::gaussian_price(double x, double v) const {
  if (v < 0.0) throw Error("remaining variance must be non-negative");
  if (v == 0.0) return (*this)(x);
  const double sd = std::sqrt(v);
  switch (kind) {
    case Kind::straddle: {
      const double z = x / sd;
      return x * (2.0 * norm_cdf(z) - 1.0) + 2.0 * sd * norm_pdf(z);
    }
    case Kind::binary: return norm_cdf(x / sd);
    case Kind::gaussian_window: {
      const double total = v + parameter * parameter;
      return std::exp(-0.5 * x * x / total) * kInvSqrt2Pi / std::sqrt(total);
    }
    case Kind::vanilla_call: {
      const double d = (x - parameter) / sd;
      return (x - parameter) * norm_cdf(d) + sd * norm_pdf(d);
    }
    case Kind::constant: return parameter;
  }
  return 0.0;
}

double gaussian_hedge_delta(const ExoticPayoff& payoff, double x, double v) {
  if (!(v > 0.0)) throw Error("remaining variance must be positive");
  using Kind = ExoticPayoff::Kind;
  switch (payoff.kind) {
    case Kind::straddle: return 2.0 * norm_cdf(x / std::sqrt(v)) - 1.0;
    case Kind::binary: {
      const double sd = std::sqrt(v);
      return norm_pdf(x / sd) / sd;
    }
    case Kind::gaussian_window: {
      const double total = v + payoff.parameter * payoff.parameter;
      return -x / total * std::exp(-0.5 * x * x / total) * kInvSqrt2Pi / std::sqrt(total);
    }
    case Kind::vanilla_call: return norm_cdf((x - payoff.parameter) / std::sqrt(v));
    case Kind::constant: return 0.0;
  }
  return 0.0;
}

void validate(const HedgeConfig& h) {
  if (h.hedge_vol && !(*h.hedge_vol > 0.0)) throw Error("hedge_vol must be positive");
  if (h.rebalance_every == 0) throw Error("rebalance_every must be at least 1");
}

std::vector<double> PathValues::column(const std::vector<double>& m, std::size_t j) const {
  std::vector<double> c(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) c[p] = m[p * n_payoffs + j];
  return c;
}

namespace {

// f'(u); the binary's point mass is smoothed with a Gaussian kernel.
double payoff_slope(const ExoticPayoff& f, double u, double bandwidth) {
  using Kind = ExoticPayoff::Kind;
  switch (f.kind) {
    case Kind::straddle: return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
    case Kind::binary: return norm_pdf(u / bandwidth) / bandwidth;
    case Kind::gaussian_window: return -u / (f.parameter * f.parameter) * f(u);
    case Kind::vanilla_call: return u > f.parameter ? 1.0 : 0.0;
    case Kind::constant: return 0.0;
  }
  return 0.0;
}

}  // namespace

PathValues hedged_path_values(const PathEnsemble& e, std::span<const ExoticPayoff> payoffs,
                              const HedgeConfig& h, std::size_t horizon) {
  validate(e);
  validate(h);
  if (horizon == 0) horizon = e.n_steps;
  if (horizon > e.n_steps) throw Error("mismatched horizon");
  if (payoffs.empty()) throw Error("no payoffs to price");
  if (e.n_paths < 2) throw Error("insufficient samples");

  const auto terminal = terminal_returns(e, horizon);
  const double n = static_cast<double>(e.n_paths);
  const double mean = ordered_sum(terminal) / n;
  std::vector<double> sq(terminal.size());
  for (std::size_t p = 0; p < sq.size(); ++p) sq[p] = (terminal[p] - mean) * (terminal[p] - mean);
  const double sd = std::sqrt(ordered_sum(sq) / n);
  if (!(sd > 0.0)) throw Error("degenerate sample");

  const double var_scale =
      h.hedge_vol ? (*h.hedge_vol) * (*h.hedge_vol) * static_cast<double>(horizon) * e.step_days /
                        (sd * sd)
                  : 1.0;
  const double drift = mean / static_cast<double>(horizon);
  const double inv_sd = 1.0 / sd;
  const std::size_t k = payoffs.size();
  const double steps = static_cast<double>(horizon);

  PathValues out;
  out.n_paths = e.n_paths;
  out.n_payoffs = k;
  out.hedged.resize(e.n_paths * k);
  out.unhedged.resize(e.n_paths * k);
  out.terminal_mean = mean;
  out.terminal_std = sd;
  out.u.resize(e.n_paths);
  std::vector<double> delta_avg(h.enabled ? e.n_paths * k : 0, 0.0);

#pragma omp parallel
  {
    std::vector<double> delta(k, 0.0);
    std::vector<double> pnl(k, 0.0);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ip = 0; ip < static_cast<std::ptrdiff_t>(e.n_paths); ++ip) {
      const auto p = static_cast<std::size_t>(ip);
      const auto row = e.row(p);
      std::fill(pnl.begin(), pnl.end(), 0.0);
      if (h.enabled) {
        double x = 0.0;
        for (std::size_t t = 0; t < horizon; ++t) {
          if (t % h.rebalance_every == 0) {
            const double v = var_scale * (steps - static_cast<double>(t)) / steps;
            for (std::size_t j = 0; j < k; ++j) delta[j] = gaussian_hedge_delta(payoffs[j], x, v);
          }
          const double dx = (row[t] - drift) * inv_sd;
          for (std::size_t j = 0; j < k; ++j) {
            pnl[j] += delta[j] * dx;
            delta_avg[p * k + j] += delta[j] / steps;
          }
          x += dx;
        }
      }
      const double u = (terminal[p] - mean) * inv_sd;
      out.u[p] = u;
      for (std::size_t j = 0; j < k; ++j) {
        const double f = payoffs[j](u);
        out.unhedged[p * k + j] = f;
        out.hedged[p * k + j] = f - pnl[j];
      }
    }
  }

  // Sensitivities of the sample price to the estimated location and scale.
  const double bandwidth = 1.06 * std::pow(n, -0.2);
  out.drift_slope.resize(k);
  out.scale_slope.resize(k);
  out.hedge_delta_mean.assign(k, 0.0);
  std::vector<double> col(e.n_paths);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t p = 0; p < e.n_paths; ++p) col[p] = payoff_slope(payoffs[j], out.u[p], bandwidth);
    out.drift_slope[j] = ordered_sum(col) / n;
    for (std::size_t p = 0; p < e.n_paths; ++p) col[p] *= payoffs[j].kind == ExoticPayoff::Kind::binary ? 0.0 : out.u[p];
    out.scale_slope[j] = ordered_sum(col) / n;
    if (h.enabled) {
      for (std::size_t p = 0; p < e.n_paths; ++p) col[p] = delta_avg[p * k + j];
      out.hedge_delta_mean[j] = ordered_sum(col) / n;
    }
  }
  return out;
}

namespace {

struct ColumnStats {
  double mean = 0.0;
  double variance = 0.0;  // 1/(n-1)
};

ColumnStats column_stats(std::span<const double> c) {
  const double n = static_cast<double>(c.size());
  ColumnStats s;
  s.mean = ordered_sum(c) / n;
  std::vector<double> sq(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) sq[i] = (c[i] - s.mean) * (c[i] - s.mean);
  s.variance = c.size() > 1 ? ordered_sum(sq) / (n - 1.0) : 0.0;
  return s;
}

}  // namespace

std::vector<double> influence(const PathValues& v, std::size_t j, bool hedged) {
  if (j >= v.n_payoffs) throw Error("payoff index out of range");
  auto y = v.column(hedged ? v.hedged : v.unhedged, j);
  const double mean = ordered_sum(y) / static_cast<double>(v.n_paths);
  const double drift = v.drift_slope[j] - (hedged ? v.hedge_delta_mean[j] : 0.0);
  const double scale = v.scale_slope[j];
  for (std::size_t p = 0; p < v.n_paths; ++p) {
    const double u = v.u[p];
    y[p] = y[p] - mean - drift * u - 0.5 * scale * (u * u - 1.0);
  }
  return y;
}

PriceEstimate summarize(const PathValues& v, std::size_t payoff_index, bool hedged) {
  if (payoff_index >= v.n_payoffs) throw Error("payoff index out of range");
  const auto plain = column_stats(v.column(v.unhedged, payoff_index));
  const auto used = hedged ? column_stats(v.column(v.hedged, payoff_index)) : plain;
  const auto infl = column_stats(influence(v, payoff_index, hedged));
  PriceEstimate out;
  out.value = used.mean;
  out.n_paths = v.n_paths;
  out.std_error = std::sqrt(infl.variance / static_cast<double>(v.n_paths));
  out.variance_ratio = plain.variance > 0.0 ? used.variance / plain.variance : 1.0;
  return out;
}

PriceEstimate hedged_price(const PathEnsemble& e, const ExoticPayoff& payoff, const HedgeConfig& h,
                           std::size_t horizon) {
  const std::array<ExoticPayoff, 1> one{payoff};
  const auto values = hedged_path_values(e, one, h, horizon);
  return summarize(values, 0, h.enabled);
}

ExoticSmile price_smile_exotics(const PathEnsemble& e, const KernelConfig& kernel,
                                const HedgeConfig& h, std::size_t horizon) {
  const KernelConfig k = kernel.delta_grid.empty() ? default_kernel_config(e.n_paths) : kernel;
  validate(k);
  if (horizon == 0) horizon = e.n_steps;

  std::vector<ExoticPayoff> payoffs{ExoticPayoff::straddle(), ExoticPayoff::binary()};
  for (double d : k.delta_grid) payoffs.push_back(ExoticPayoff::gaussian_window(d));
  const auto values = hedged_path_values(e, payoffs, h, horizon);

  ExoticSmile out;
  out.straddle = summarize(values, 0, h.enabled);
  out.binary = summarize(values, 1, h.enabled);
  std::vector<double> window_means;
  for (std::size_t j = 0; j < k.delta_grid.size(); ++j) {
    out.windows.push_back(summarize(values, 2 + j, h.enabled));
    window_means.push_back(out.windows.back().value);
  }
  const auto fit = extrapolate_to_zero(k.delta_grid, window_means, k.extrapolation_order);
  out.density_at_zero = accept_density_intercept(fit.intercept, window_means);

  auto& c = out.coefficients;
  c.alpha = kSqrtHalfPi * out.straddle.value;
  c.beta = kSqrtHalfPi * (1.0 - 2.0 * out.binary.value);
  if (!(c.alpha > 0.0)) throw Error("degenerate sample");
  c.gamma = kSqrtHalfPi * out.density_at_zero - 0.5 / c.alpha;
  c.horizon_days = static_cast<int>(static_cast<double>(horizon) * e.step_days);
  c.method = SmileMethod::exotic_mc;

  // Linearized per-path contributions of the density and gamma.
  std::vector<double> density(values.n_paths, 0.0);
  for (std::size_t j = 0; j < fit.weights.size(); ++j) {
    const auto w = influence(values, 2 + j, h.enabled);
    for (std::size_t p = 0; p < values.n_paths; ++p) density[p] += fit.weights[j] * w[p];
  }
  const auto straddle = influence(values, 0, h.enabled);
  std::vector<double> gamma(values.n_paths);
  const double dgamma_dstraddle = 0.5 / (c.alpha * c.alpha) * kSqrtHalfPi;
  for (std::size_t p = 0; p < values.n_paths; ++p) {
    gamma[p] = kSqrtHalfPi * density[p] + dgamma_dstraddle * straddle[p];
  }
  const double root_n = std::sqrt(static_cast<double>(values.n_paths));
  out.density_se = std::sqrt(column_stats(density).variance) / root_n;
  c.alpha_se = kSqrtHalfPi * out.straddle.std_error;
  c.beta_se = 2.0 * kSqrtHalfPi * out.binary.std_error;
  c.gamma_se = std::sqrt(column_stats(gamma).variance) / root_n;
  return out;
}

}  // namespace fairsmile
