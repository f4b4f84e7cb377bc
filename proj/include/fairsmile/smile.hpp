#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairsmile/core.hpp"

namespace fairsmile {

// Bandwidths for the Gaussian "no-move" window exp(-u^2/2d^2)/sqrt(2 pi d^2)
// and the polynomial order in d used to extrapolate its price to d = 0.
struct KernelConfig {
  std::vector<double> delta_grid;
  int extrapolation_order = 4;  // 2: p0 + a d^2;  4: p0 + a d^2 + b d^4
};

void validate(const KernelConfig& k);

// {0.5, 0.4, 0.3, 0.25, 0.2} widened by (N / 1e4)^(-1/5) for N < 1e4.
[[nodiscard]] KernelConfig default_kernel_config(std::size_t n_samples);

// p_d(0) for every bandwidth in the grid (OpenMP kernel).
[[nodiscard]] std::vector<double> kernel_density_profile(std::span<const double> u,
                                                         std::span<const double> deltas);

// Least-squares extrapolation of values(d) to d = 0. The intercept is a fixed
// linear combination of the inputs; `weights` holds it so callers can
// propagate per-path errors.
struct Extrapolation {
  double intercept = 0.0;
  std::vector<double> weights;
  std::vector<double> residuals;
};

[[nodiscard]] Extrapolation extrapolate_to_zero(std::span<const double> deltas,
                                                std::span<const double> values, int order);

// Validates an extrapolated density. A slightly negative intercept is read as
// zero density when it is no larger than the largest estimate on the grid;
// anything else negative or non-finite throws "extrapolation failed".
[[nodiscard]] double accept_density_intercept(double p0, std::span<const double> profile);

// Straddle: sqrt(pi/2) E|u|.
[[nodiscard]] double alpha_hat(std::span<const double> u);
// Binary: sqrt(pi/2) (1 - 2 P(u > 0)), ties at 0 pay 1/2.
[[nodiscard]] double beta_hat(std::span<const double> u);
// Density at zero from the extrapolated no-move option.
[[nodiscard]] double density_at_zero(std::span<const double> u, const KernelConfig& k);
// sqrt(pi/2) p(0) - 1 / (2 alpha).
[[nodiscard]] double gamma_hat(std::span<const double> u, const KernelConfig& k);

[[nodiscard]] inline double alpha_hat(const SampleSet& s) { return alpha_hat(s.values()); }
[[nodiscard]] inline double beta_hat(const SampleSet& s) { return beta_hat(s.values()); }
[[nodiscard]] inline double gamma_hat(const SampleSet& s, const KernelConfig& k) {
  return gamma_hat(s.values(), k);
}

// The three estimators with bootstrap standard errors. Each resample is
// re-standardized before estimation.
[[nodiscard]] SmileCoefficients estimate_smile(const SampleSet& s, const KernelConfig& k,
                                               const BootstrapOptions& boot);

struct EdgeworthSmile {
  double implied_vol = 0.0;
  std::vector<std::string> warnings;
};

// sigma (1 + (S/6) M + (kappa/24) (M^2 - 1)). Warnings flag |S| or |kappa|
// above 1 and S^2 > kappa, where the cumulant expansion is not expected to
// hold.
[[nodiscard]] EdgeworthSmile edgeworth_smile(const MomentSummary& m, double vol, double moneyness);

// (1 - kappa/24, S/6, kappa/24).
[[nodiscard]] SmileCoefficients edgeworth_coefficients(const MomentSummary& m);

// P(u > x) ~ Nbar(x) + (S/6) N'''(x) - (kappa/24) N''''(x).
[[nodiscard]] double edgeworth_tail(const MomentSummary& m, double x);

// alpha = alpha', beta = beta'/alpha, gamma = gamma'/alpha^2 - beta'^2/alpha^3.
[[nodiscard]] SmileCoefficients convert_gaussian_moneyness(const GaussianMoneynessCoefficients& g);
[[nodiscard]] GaussianMoneynessCoefficients to_gaussian_moneyness(const SmileCoefficients& c);

}  // namespace fairsmile
