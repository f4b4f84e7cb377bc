#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fairsmile/models.hpp"
#include "fairsmile/smile.hpp"

namespace fairsmile {

// Payoffs written on the standardized terminal return u. The first three are
// the options whose prices give the smile coefficients; the vanilla call is
// used by the implied-vol oracle and the constant payoff by tests.
struct ExoticPayoff {
  enum class Kind { straddle, binary, gaussian_window, vanilla_call, constant };

  Kind kind = Kind::straddle;
  // Window width, call strike in units of u, or the constant value.
  double parameter = 0.0;

  static ExoticPayoff straddle() { return {Kind::straddle, 0.0}; }
  static ExoticPayoff binary() { return {Kind::binary, 0.0}; }
  static ExoticPayoff gaussian_window(double width);
  static ExoticPayoff vanilla_call(double strike) { return {Kind::vanilla_call, strike}; }
  static ExoticPayoff constant(double value) { return {Kind::constant, value}; }

  [[nodiscard]] double operator()(double u) const noexcept;

  // C(x, v) = E[f(x + sqrt(v) Z)], the price when the remaining move is
  // Gaussian with variance v.
  [[nodiscard]] double gaussian_price(double x, double v) const;
};

// dC/dx of the Gaussian-model price. Throws for v <= 0.
[[nodiscard]] double gaussian_hedge_delta(const ExoticPayoff& payoff, double x, double v);

struct HedgeConfig {
  bool enabled = true;
  // Per sqrt(day). Unset: the ensemble's own realized terminal vol, which
  // makes the remaining-variance fraction (T - t) / T.
  std::optional<double> hedge_vol;
  std::size_t rebalance_every = 1;
};

void validate(const HedgeConfig& h);

struct PriceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double variance_ratio = 1.0;  // var(hedged) / var(unhedged)
};

// Per-path payoff values, with and without the hedge P&L, laid out
// path-major: values[p * n_payoffs + j].
struct PathValues {
  std::size_t n_paths = 0;
  std::size_t n_payoffs = 0;
  std::vector<double> hedged;
  std::vector<double> unhedged;
  double terminal_mean = 0.0;  // raw horizon return removed before scaling
  double terminal_std = 0.0;   // raw horizon std used to standardize
  std::vector<double> u;       // standardized terminal return per path
  // Per payoff: mean f'(u), mean u f'(u) and the time-averaged hedge delta.
  std::vector<double> drift_slope;
  std::vector<double> scale_slope;
  std::vector<double> hedge_delta_mean;

  [[nodiscard]] std::vector<double> column(const std::vector<double>& m, std::size_t j) const;
};

// OpenMP kernel. Per path: x_t is the running return, demeaned and scaled by
// the ensemble terminal std so x_T = u; the hedged value is
// f(u) - sum_t delta(x_t, v_t) (x_{t+1} - x_t).
[[nodiscard]] PathValues hedged_path_values(const PathEnsemble& e,
                                            std::span<const ExoticPayoff> payoffs,
                                            const HedgeConfig& h, std::size_t horizon);

// Per-path linearized contribution to the price estimate. Besides the payoff
// (or hedged value) it carries the error from standardizing by the sample
// mean and std, which the hedge does not remove.
[[nodiscard]] std::vector<double> influence(const PathValues& v, std::size_t payoff_index,
                                            bool hedged);

// std_error is the spread of the influence over paths.
[[nodiscard]] PriceEstimate summarize(const PathValues& v, std::size_t payoff_index,
                                      bool hedged);

// Horizon defaults to the full ensemble length.
[[nodiscard]] PriceEstimate hedged_price(const PathEnsemble& e, const ExoticPayoff& payoff,
                                         const HedgeConfig& h, std::size_t horizon = 0);

struct ExoticSmile {
  SmileCoefficients coefficients;
  PriceEstimate straddle;
  PriceEstimate binary;
  std::vector<PriceEstimate> windows;  // one per kernel bandwidth
  double density_at_zero = 0.0;
  double density_se = 0.0;
};

// Smile coefficients read off the prices of the straddle, the binary and the
// no-move windows (extrapolated to zero width). Standard errors come from the
// per-path linearization of each coefficient, so they account for the
// correlation between the three prices.
[[nodiscard]] ExoticSmile price_smile_exotics(const PathEnsemble& e, const KernelConfig& k,
                                              const HedgeConfig& h, std::size_t horizon = 0);

[[nodiscard]] inline SmileCoefficients smile_via_exotics(const PathEnsemble& e,
                                                         const KernelConfig& k,
                                                         const HedgeConfig& h,
                                                         std::size_t horizon = 0) {
  return price_smile_exotics(e, k, h, horizon).coefficients;
}

}  // namespace fairsmile
