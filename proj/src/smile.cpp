#include "fairsmile/smile.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "fairsmile/normal.hpp"
#include "fairsmile/parallel.hpp"

namespace fairsmile {

void validate(const KernelConfig& k) {
  if (k.delta_grid.size() < 3) throw Error("kernel grid needs at least 3 bandwidths");
  for (std::size_t i = 0; i < k.delta_grid.size(); ++i) {
    const double d = k.delta_grid[i];
    if (!(d > 0.0) || !std::isfinite(d)) throw Error("kernel bandwidths must be positive");
    if (i > 0 && !(d < k.delta_grid[i - 1])) {
      throw Error("kernel bandwidths must be strictly decreasing");
    }
  }
  if (k.extrapolation_order != 2 && k.extrapolation_order != 4) {
    throw Error("extrapolation order must be 2 or 4");
  }
  if (k.extrapolation_order == 4 && k.delta_grid.size() < 4) {
    throw Error("quartic extrapolation needs at least 4 bandwidths");
  }
}

KernelConfig default_kernel_config(std::size_t n_samples) {
  const double n = static_cast<double>(std::max<std::size_t>(n_samples, 1));
  const double widen = std::max(1.0, std::pow(n / 1.0e4, -0.2));
  KernelConfig k;
  for (double d : {0.5, 0.4, 0.3, 0.25, 0.2}) k.delta_grid.push_back(d * widen);
  return k;
}

std::vector<double> kernel_density_profile(std::span<const double> u,
                                           std::span<const double> deltas) {
  constexpr std::size_t kBlock = 4096;
  const std::size_t n = u.size();
  const std::size_t k = deltas.size();
  if (n == 0) throw Error("insufficient samples");
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;

  std::vector<double> inv_two_var(k);
  for (std::size_t j = 0; j < k; ++j) inv_two_var[j] = 0.5 / (deltas[j] * deltas[j]);

  std::vector<double> partial(n_blocks * k, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n_blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double* acc = partial.data() + static_cast<std::size_t>(b) * k;
    for (std::size_t i = lo; i < hi; ++i) {
      const double u2 = u[i] * u[i];
      for (std::size_t j = 0; j < k; ++j) acc[j] += std::exp(-u2 * inv_two_var[j]);
    }
  }

  std::vector<double> profile(k, 0.0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    for (std::size_t j = 0; j < k; ++j) profile[j] += partial[b * k + j];
  }
  for (std::size_t j = 0; j < k; ++j) {
    profile[j] *= kInvSqrt2Pi / (deltas[j] * static_cast<double>(n));
  }
  return profile;
}

Extrapolation extrapolate_to_zero(std::span<const double> deltas, std::span<const double> values,
                                  int order) {
  if (deltas.size() != values.size()) throw Error("extrapolation grid size mismatch");
  const auto rows = static_cast<Eigen::Index>(deltas.size());
  const Eigen::Index cols = order / 2 + 1;
  if (rows < cols) throw Error("extrapolation failed");

  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double d2 = deltas[static_cast<std::size_t>(i)] * deltas[static_cast<std::size_t>(i)];
    double power = 1.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      x(i, c) = power;
      power *= d2;
    }
    y(i) = values[static_cast<std::size_t>(i)];
  }

  const Eigen::MatrixXd normal = x.transpose() * x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (lu.rank() < cols) throw Error("extrapolation failed");
  const Eigen::VectorXd z = lu.solve(Eigen::VectorXd::Unit(cols, 0));
  const Eigen::VectorXd w = x * z;
  const Eigen::VectorXd beta = lu.solve(x.transpose() * y);
  const Eigen::VectorXd resid = y - x * beta;

  Extrapolation out;
  out.intercept = w.dot(y);
  out.weights.assign(w.data(), w.data() + rows);
  out.residuals.assign(resid.data(), resid.data() + rows);
  return out;
}

double alpha_hat(std::span<const double> u) {
  if (u.empty()) throw Error("insufficient samples");
  double s = 0.0;
  for (double x : u) s += std::abs(x);
  return kSqrtHalfPi * s / static_cast<double>(u.size());
}

double beta_hat(std::span<const double> u) {
  if (u.empty()) throw Error("insufficient samples");
  double up = 0.0;
  for (double x : u) {
    if (x > 0.0) {
      up += 1.0;
    } else if (x == 0.0) {
      up += 0.5;
    }
  }
  return kSqrtHalfPi * (1.0 - 2.0 * up / static_cast<double>(u.size()));
}

double accept_density_intercept(double p0, std::span<const double> profile) {
  if (!std::isfinite(p0)) throw Error("extrapolation failed");
  if (p0 >= 0.0) return p0;
  const double scale = *std::max_element(profile.begin(), profile.end());
  if (-p0 <= scale) return 0.0;
  throw Error("extrapolation failed");
}

double density_at_zero(std::span<const double> u, const KernelConfig& k) {
  validate(k);
  const auto profile = kernel_density_profile(u, k.delta_grid);
  const auto fit = extrapolate_to_zero(k.delta_grid, profile, k.extrapolation_order);
  return accept_density_intercept(fit.intercept, profile);
}

double gamma_hat(std::span<const double> u, const KernelConfig& k) {
  const double alpha = alpha_hat(u);
  if (!(alpha > 0.0)) throw Error("degenerate sample");
  return kSqrtHalfPi * density_at_zero(u, k) - 0.5 / alpha;
}

SmileCoefficients estimate_smile(const SampleSet& s, const KernelConfig& k,
                                 const BootstrapOptions& boot) {
  SmileCoefficients c;
  c.alpha = alpha_hat(s);
  c.beta = beta_hat(s);
  c.gamma = gamma_hat(s, k);
  c.horizon_days = s.horizon_days;
  c.method = SmileMethod::exotic_mc;

  const auto se = bootstrap_se(
      [&k](std::span<const double> resample) {
        const auto z = standardize(resample, 1);
        return std::vector<double>{alpha_hat(z), beta_hat(z), gamma_hat(z, k)};
      },
      s.values(), boot);
  c.alpha_se = se[0];
  c.beta_se = se[1];
  c.gamma_se = se[2];
  return c;
}

EdgeworthSmile edgeworth_smile(const MomentSummary& m, double vol, double moneyness) {
  EdgeworthSmile out;
  const double s = m.skewness;
  const double kappa = m.excess_kurtosis;
  out.implied_vol =
      vol * (1.0 + s / 6.0 * moneyness + kappa / 24.0 * (moneyness * moneyness - 1.0));
  if (std::abs(s) > 1.0) out.warnings.emplace_back("|skewness| > 1: expansion unreliable");
  if (std::abs(kappa) > 1.0) out.warnings.emplace_back("|kurtosis| > 1: expansion unreliable");
  if (s * s > kappa) out.warnings.emplace_back("skewness^2 > kurtosis: expansion assumption violated");
  return out;
}

SmileCoefficients edgeworth_coefficients(const MomentSummary& m) {
  SmileCoefficients c;
  c.alpha = 1.0 - m.excess_kurtosis / 24.0;
  c.beta = m.skewness / 6.0;
  c.gamma = m.excess_kurtosis / 24.0;
  c.method = SmileMethod::edgeworth;
  return c;
}

double edgeworth_tail(const MomentSummary& m, double x) {
  const double phi = norm_pdf(x);
  const double third = (x * x - 1.0) * phi;
  const double fourth = -x * (x * x - 3.0) * phi;
  return norm_sf(x) + m.skewness / 6.0 * third - m.excess_kurtosis / 24.0 * fourth;
}

SmileCoefficients convert_gaussian_moneyness(const GaussianMoneynessCoefficients& g) {
  if (!(g.alpha_p > 0.0)) throw Error("alpha' must be positive");
  const double a = g.alpha_p;
  SmileCoefficients c;
  c.alpha = a;
  c.beta = g.beta_p / a;
  c.gamma = g.gamma_p / (a * a) - g.beta_p * g.beta_p / (a * a * a);
  return c;
}

GaussianMoneynessCoefficients to_gaussian_moneyness(const SmileCoefficients& c) {
  if (!(c.alpha > 0.0)) throw Error("alpha must be positive");
  GaussianMoneynessCoefficients g;
  g.alpha_p = c.alpha;
  g.beta_p = c.beta * c.alpha;
  g.gamma_p = c.alpha * c.alpha * c.gamma + c.alpha * c.beta * c.beta;
  return g;
}

}  // namespace fairsmile
