#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fairsmile/core.hpp"

namespace fairsmile {

struct OhlcBar {
  std::chrono::year_month_day date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
};

// Throws with `context` prefixed to the message when the bar is invalid.
void validate(const OhlcBar& bar, const std::string& context = {});

struct OhlcSeries {
  std::vector<OhlcBar> bars;
  std::vector<double> rs_variance;  // per bar
  std::vector<double> ema_vol;      // per bar, NaN until the EMA is seeded
  RegimeMasks regimes;              // per bar

  [[nodiscard]] std::size_t size() const noexcept { return bars.size(); }
  [[nodiscard]] std::vector<double> closes() const;
};

[[nodiscard]] std::chrono::year_month_day parse_iso_date(std::string_view text);
[[nodiscard]] std::string format_iso_date(std::chrono::year_month_day d);

// Header "date,open,high,low,close"; errors name the offending line.
// Derived columns are filled in when the series is long enough.
[[nodiscard]] OhlcSeries parse_ohlc_csv(const std::filesystem::path& path);
[[nodiscard]] OhlcSeries parse_ohlc_csv_text(std::string_view text);
void write_ohlc_csv(const std::filesystem::path& path, std::span<const OhlcBar> bars);

// ln(H/O) ln(H/C) + ln(L/O) ln(L/C)
[[nodiscard]] double rogers_satchell(const OhlcBar& bar);

// EMA of the Rogers-Satchell variance with decay 1/window, seeded with the
// mean of the first `window` values. The vol assigned to bar t only uses bars
// strictly before t; the first `window` bars get NaN.
[[nodiscard]] std::vector<double> ema_vol(std::span<const double> rs_variance,
                                          std::size_t window = 20);

// High iff ema vol > median over labeled days; exact ties go to low vol.
[[nodiscard]] RegimeMasks regime_split(std::span<const double> vols);

// Fills rs_variance, ema_vol and regimes. Throws "series too short" when
// there are not enough bars to seed the EMA.
void derive(OhlcSeries& series, std::size_t window = 20);
[[nodiscard]] OhlcSeries make_series(std::vector<OhlcBar> bars, std::size_t window = 20);

// Overlapping close-to-close returns close[t+T]/close[t] - 1 for every start
// day t with mask[t] set (empty mask = every day).
[[nodiscard]] std::vector<double> window_returns(std::span<const double> closes,
                                                 std::size_t horizon,
                                                 const std::vector<bool>& mask = {});

inline constexpr std::size_t kMinWindows = 50;

// Regime-conditioned, standardized horizon-T returns. The SampleSet keeps the
// chronological window order so block bootstraps see the overlap.
[[nodiscard]] SampleSet build_return_windows(const OhlcSeries& series, std::size_t horizon,
                                             Regime regime);

// Synthetic OHLC bars whose closes follow close_t = close_{t-1} (1 + r_t).
// Intraday highs/lows come from a Brownian bridge between open and close.
[[nodiscard]] std::vector<OhlcBar> synthesize_ohlc(std::span<const double> daily_returns,
                                                   double start_price, double intraday_vol,
                                                   std::uint64_t seed);

}  // namespace fairsmile
