#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairsmile/core.hpp"

namespace fairsmile {

// Daily return paths, row-major (one row per path). Returns are additive:
// the horizon-T return of a path is the sum of its first T entries.
struct PathEnsemble {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  double step_days = 1.0;
  std::vector<double> returns;
  std::string model_tag;
  std::uint64_t seed = 0;
  // Trailing EMA vol over the simulated pre-window, one per path; empty when
  // the model has no pre-window. Used for high/low regime selection.
  std::vector<double> pre_vol;
  // Number of steps where the GAARCH vol floor at zero was hit.
  std::uint64_t vol_floor_hits = 0;

  [[nodiscard]] std::span<const double> row(std::size_t path) const {
    return {returns.data() + path * n_steps, n_steps};
  }
  [[nodiscard]] double horizon_days() const noexcept {
    return static_cast<double>(n_steps) * step_days;
  }
};

void validate(const PathEnsemble& e);

struct NonlinearLeverageParams {
  double base_vol = 0.01;  // sigma-bar, per sqrt(day)
  double epsilon = 0.1;
  double theta = 0.0;
  double omega = 0.1;      // per day
};

struct GaarchParams {
  double base_vol = 0.01;  // per sqrt(day)
  double rho = 0.9;
  double nu = 0.1;
};

void validate(const NonlinearLeverageParams& p);
void validate(const GaarchParams& p);

// sigma_t^2 = base^2 [1 + 2 eps |xi + theta| 1{xi + theta < 0}]
[[nodiscard]] double instantaneous_variance(const NonlinearLeverageParams& p, double xi) noexcept;

// One Euler step of the leverage driver with unit time step.
[[nodiscard]] inline double next_leverage_state(double xi, double dw, double omega) noexcept {
  return (1.0 - omega) * xi + omega * dw;
}

// chi_{t+1} = rho chi_t + nu (1 + chi_t) [eta^2 1{eta < 0} - 1/2]
[[nodiscard]] double next_gaarch_state(const GaarchParams& p, double chi, double eta) noexcept;

// Vol implied by the GAARCH state, floored at zero.
[[nodiscard]] inline double gaarch_vol(const GaarchParams& p, double chi) noexcept {
  const double v = p.base_vol * (1.0 + chi);
  return v > 0.0 ? v : 0.0;
}

[[nodiscard]] std::size_t leverage_burn_in(const NonlinearLeverageParams& p) noexcept;
[[nodiscard]] std::size_t gaarch_burn_in(const GaarchParams& p) noexcept;

// Trailing EMA vol of a squared-return sequence with decay 1/window, seeded by
// the mean of the first `window` values. Returns NaN if the sequence is
// shorter than the window.
[[nodiscard]] double trailing_ema_vol(std::span<const double> squared_returns,
                                      std::size_t window = 20);

// OpenMP kernels. Path p draws its noise from the counter stream
// (seed, p), so the output is bit-identical for any worker count.
[[nodiscard]] PathEnsemble simulate_gaussian(double vol, std::size_t horizon_days,
                                             std::size_t n_paths, std::uint64_t seed);
[[nodiscard]] PathEnsemble simulate_nonlinear_leverage(const NonlinearLeverageParams& p,
                                                       std::size_t horizon_days,
                                                       std::size_t n_paths, std::uint64_t seed);
[[nodiscard]] PathEnsemble simulate_gaarch(const GaarchParams& p, std::size_t horizon_days,
                                           std::size_t n_paths, std::uint64_t seed);

// Per-path horizon-T returns (sum of the first T steps).
[[nodiscard]] std::vector<double> terminal_returns(const PathEnsemble& e, std::size_t horizon);

// Keeps only paths whose regime label matches. The label is the median split
// of `pre_vol` across paths, the same rule applied to market data.
[[nodiscard]] PathEnsemble select_regime(const PathEnsemble& e, Regime regime);

// Standardized horizon-T returns of an ensemble.
[[nodiscard]] SampleSet ensemble_samples(const PathEnsemble& e, std::size_t horizon,
                                         Regime regime = Regime::all);

}  // namespace fairsmile
