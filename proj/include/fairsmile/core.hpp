#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairsmile {

// All library failures surface as this exception; the message is the
// user-facing diagnostic.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Regime { all, high_vol, low_vol };

[[nodiscard]] std::string_view to_string(Regime r) noexcept;
[[nodiscard]] Regime parse_regime(std::string_view text);

// Standardized terminal returns u = (r - mean) / std for one horizon and
// regime. `location` and `scale` are the constants removed at
// standardization, kept so outputs can be mapped back to raw returns.
struct SampleSet {
  std::vector<double> samples;
  int horizon_days = 1;
  Regime regime = Regime::all;
  std::string source;
  double location = 0.0;
  double scale = 1.0;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return samples; }
};

struct MomentSummary {
  double mean = 0.0;
  double std = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double median = 0.0;
  std::size_t count = 0;
};

enum class SmileMethod { exotic_mc, edgeworth, iv_fit };

[[nodiscard]] std::string_view to_string(SmileMethod m) noexcept;

// Implied vol / sigma = alpha + beta M + gamma M^2 in the moneyness
// M = (K - S0) / (S0 sigma sqrt(T)).
struct SmileCoefficients {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  double alpha_se = 0.0;
  double beta_se = 0.0;
  double gamma_se = 0.0;
  int horizon_days = 0;
  SmileMethod method = SmileMethod::exotic_mc;
};

// Same expansion written in the Gaussian moneyness M_G, which normalizes the
// strike distance by the implied vol instead of sigma.
struct GaussianMoneynessCoefficients {
  double alpha_p = 1.0;
  double beta_p = 0.0;
  double gamma_p = 0.0;
};

// Population (1/N) normalization so that the standardized sample has
// E[u^2] = 1 exactly.
[[nodiscard]] SampleSet standardize(std::span<const double> raw_returns, int horizon_days,
                                    Regime regime = Regime::all, std::string source = {});

[[nodiscard]] double median(std::span<const double> values);

[[nodiscard]] MomentSummary compute_moments(std::span<const double> values);
[[nodiscard]] inline MomentSummary compute_moments(const SampleSet& s) {
  return compute_moments(s.values());
}

using Estimator = std::function<double(std::span<const double>)>;
using VectorEstimator = std::function<std::vector<double>(std::span<const double>)>;

struct BootstrapOptions {
  int n_boot = 200;
  std::uint64_t seed = 1;
  // 1 = i.i.d. resampling; > 1 = moving-block bootstrap for overlapping
  // windows.
  std::size_t block_length = 1;
};

// Standard deviation of `estimator` over resamples with replacement.
// Resamples are keyed by (seed, resample index), so the result does not
// depend on the worker count.
[[nodiscard]] double bootstrap_se(const Estimator& estimator, std::span<const double> samples,
                                  const BootstrapOptions& options);
[[nodiscard]] std::vector<double> bootstrap_se(const VectorEstimator& estimator,
                                               std::span<const double> samples,
                                               const BootstrapOptions& options);

// High/low vol labels from a median split: high iff vol > median of the
// finite entries, low otherwise. NaN entries are unlabeled (neither).
struct RegimeMasks {
  std::vector<bool> high;
  std::vector<bool> low;
  double median_vol = 0.0;

  [[nodiscard]] const std::vector<bool>& mask(Regime r) const;
};

[[nodiscard]] RegimeMasks median_split(std::span<const double> vols);

// Fills `out` with resample `index` of `samples`.
void bootstrap_resample(std::span<const double> samples, const BootstrapOptions& options,
                        std::uint64_t index, std::vector<double>& out);

}  // namespace fairsmile
