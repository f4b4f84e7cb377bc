#include "fairsmile/core.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "fairsmile/parallel.hpp"
#include "fairsmile/rng.hpp"

namespace fairsmile {

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::all: return "all";
    case Regime::high_vol: return "high_vol";
    case Regime::low_vol: return "low_vol";
  }
  return "all";
}

Regime parse_regime(std::string_view text) {
  if (text == "all") return Regime::all;
  if (text == "high_vol" || text == "high") return Regime::high_vol;
  if (text == "low_vol" || text == "low") return Regime::low_vol;
  throw Error("unknown regime '" + std::string(text) + "'");
}

std::string_view to_string(SmileMethod m) noexcept {
  switch (m) {
    case SmileMethod::exotic_mc: return "exotic_mc";
    case SmileMethod::edgeworth: return "edgeworth";
    case SmileMethod::iv_fit: return "iv_fit";
  }
  return "exotic_mc";
}

SampleSet standardize(std::span<const double> raw_returns, int horizon_days, Regime regime,
                      std::string source) {
  if (raw_returns.size() < 2) throw Error("insufficient samples");
  for (double r : raw_returns) {
    if (!std::isfinite(r)) throw Error("non-finite return in sample");
  }
  const double n = static_cast<double>(raw_returns.size());
  const double mean = ordered_sum(raw_returns) / n;
  double ss = 0.0;
  for (double r : raw_returns) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0) || sd <= 1e-300) throw Error("degenerate sample");

  SampleSet out;
  out.samples.resize(raw_returns.size());
  for (std::size_t i = 0; i < raw_returns.size(); ++i) {
    out.samples[i] = (raw_returns[i] - mean) / sd;
  }
  out.horizon_days = horizon_days;
  out.regime = regime;
  out.source = std::move(source);
  out.location = mean;
  out.scale = sd;
  return out;
}

double median(std::span<const double> values) {
  if (values.empty()) throw Error("median of empty sample");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

MomentSummary compute_moments(std::span<const double> values) {
  if (values.size() < 4) throw Error("insufficient samples for kurtosis");
  const double n = static_cast<double>(values.size());
  const double mean = ordered_sum(values) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : values) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  MomentSummary m;
  m.mean = mean;
  m.std = std::sqrt(m2);
  m.count = values.size();
  m.median = median(values);
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

const std::vector<bool>& RegimeMasks::mask(Regime r) const {
  if (r == Regime::low_vol) return low;
  if (r == Regime::high_vol) return high;
  throw Error("regime 'all' has no mask");
}

RegimeMasks median_split(std::span<const double> vols) {
  std::vector<double> labeled;
  labeled.reserve(vols.size());
  for (double v : vols) {
    if (std::isfinite(v)) labeled.push_back(v);
  }
  RegimeMasks m;
  m.high.assign(vols.size(), false);
  m.low.assign(vols.size(), false);
  if (labeled.empty()) return m;
  m.median_vol = median(labeled);
  for (std::size_t i = 0; i < vols.size(); ++i) {
    if (!std::isfinite(vols[i])) continue;
    if (vols[i] > m.median_vol) {
      m.high[i] = true;
    } else {
      m.low[i] = true;
    }
  }
  return m;
}

void bootstrap_resample(std::span<const double> samples, const BootstrapOptions& options,
                        std::uint64_t index, std::vector<double>& out) {
  const std::size_t n = samples.size();
  out.resize(n);
  CounterStream rng(options.seed, index, StreamDomain::bootstrap);
  const std::size_t block = std::clamp<std::size_t>(options.block_length, 1, n);
  if (block == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = samples[rng.below(n)];
    return;
  }
  const std::size_t starts = n - block + 1;
  std::size_t filled = 0;
  while (filled < n) {
    const std::size_t start = rng.below(starts);
    for (std::size_t j = 0; j < block && filled < n; ++j) out[filled++] = samples[start + j];
  }
}

std::vector<double> bootstrap_se(const VectorEstimator& estimator, std::span<const double> samples,
                                 const BootstrapOptions& options) {
  if (options.n_boot < 100) throw Error("bootstrap requires n_boot >= 100");
  if (samples.empty()) throw Error("insufficient samples");
  const auto n_boot = static_cast<std::size_t>(options.n_boot);
  std::vector<std::vector<double>> draws(n_boot);
  std::exception_ptr failure;

#pragma omp parallel
  {
    std::vector<double> resample;
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n_boot); ++b) {
      try {
        bootstrap_resample(samples, options, static_cast<std::uint64_t>(b), resample);
        draws[static_cast<std::size_t>(b)] = estimator(resample);
      } catch (...) {
#pragma omp critical(fairsmile_bootstrap_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t k = draws.front().size();
  std::vector<double> se(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double mean = 0.0;
    for (const auto& d : draws) mean += d.at(j);
    mean /= static_cast<double>(n_boot);
    double ss = 0.0;
    for (const auto& d : draws) ss += (d[j] - mean) * (d[j] - mean);
    se[j] = std::sqrt(ss / static_cast<double>(n_boot - 1));
  }
  return se;
}

double bootstrap_se(const Estimator& estimator, std::span<const double> samples,
                    const BootstrapOptions& options) {
  return bootstrap_se(
      [&](std::span<const double> s) { return std::vector<double>{estimator(s)}; }, samples,
      options)[0];
}

}  // namespace fairsmile
