#include "fairsmile/marketdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "fairsmile/rng.hpp"

namespace fairsmile {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::string line_context(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

std::chrono::year_month_day parse_iso_date(std::string_view text) {
  text = trim(text);
  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !parse_number(text.substr(0, 4), y) || !parse_number(text.substr(5, 2), m) ||
      !parse_number(text.substr(8, 2), d)) {
    throw Error("unparseable date '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw Error("unparseable date '" + std::string(text) + "'");
  return ymd;
}

std::string format_iso_date(std::chrono::year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

void validate(const OhlcBar& bar, const std::string& context) {
  for (double v : {bar.open, bar.high, bar.low, bar.close}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(context + "prices must be positive");
  }
  if (bar.high < std::max(bar.open, bar.close)) {
    throw Error(context + "high is below open or close");
  }
  if (bar.low > std::min(bar.open, bar.close)) {
    throw Error(context + "low is above open or close");
  }
}

std::vector<double> OhlcSeries::closes() const {
  std::vector<double> c;
  c.reserve(bars.size());
  for (const auto& b : bars) c.push_back(b.close);
  return c;
}

OhlcSeries parse_ohlc_csv_text(std::string_view text) {
  std::vector<OhlcBar> bars;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      const auto cols = split(line, ',');
      const std::vector<std::string_view> expected{"date", "open", "high", "low", "close"};
      if (cols != expected) {
        throw Error(line_context(line_no) + "expected header 'date,open,high,low,close'");
      }
      header_seen = true;
      continue;
    }
    const auto ctx = line_context(line_no);
    const auto cols = split(line, ',');
    if (cols.size() != 5) throw Error(ctx + "expected 5 columns, found " + std::to_string(cols.size()));
    OhlcBar bar;
    try {
      bar.date = parse_iso_date(cols[0]);
    } catch (const Error& e) {
      throw Error(ctx + e.what());
    }
    double* fields[] = {&bar.open, &bar.high, &bar.low, &bar.close};
    for (int i = 0; i < 4; ++i) {
      if (!parse_number(cols[static_cast<std::size_t>(i) + 1], *fields[i])) {
        throw Error(ctx + "unparseable price '" + std::string(cols[static_cast<std::size_t>(i) + 1]) + "'");
      }
    }
    validate(bar, ctx);
    if (!bars.empty() && !(std::chrono::sys_days{bar.date} > std::chrono::sys_days{bars.back().date})) {
      throw Error(ctx + "dates must be strictly increasing");
    }
    bars.push_back(bar);
  }
  if (bars.empty()) throw Error("no data");

  OhlcSeries series;
  series.bars = std::move(bars);
  if (series.size() > 20) {
    derive(series);
  } else {
    series.rs_variance.reserve(series.size());
    for (const auto& b : series.bars) series.rs_variance.push_back(rogers_satchell(b));
  }
  return series;
}

OhlcSeries parse_ohlc_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_ohlc_csv_text(buf.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_ohlc_csv(const std::filesystem::path& path, std::span<const OhlcBar> bars) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "date,open,high,low,close\n";
  char buf[160];
  for (const auto& b : bars) {
    std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%.10g\n", format_iso_date(b.date).c_str(),
                  b.open, b.high, b.low, b.close);
    out << buf;
  }
}

double rogers_satchell(const OhlcBar& bar) {
  const double ho = std::log(bar.high / bar.open);
  const double hc = std::log(bar.high / bar.close);
  const double lo = std::log(bar.low / bar.open);
  const double lc = std::log(bar.low / bar.close);
  return ho * hc + lo * lc;
}

std::vector<double> ema_vol(std::span<const double> rs_variance, std::size_t window) {
  if (window == 0) throw Error("EMA window must be positive");
  if (rs_variance.size() < window) throw Error("series too short");
  std::vector<double> vol(rs_variance.size(), std::numeric_limits<double>::quiet_NaN());
  double v = 0.0;
  for (std::size_t t = 0; t < window; ++t) v += rs_variance[t];
  v /= static_cast<double>(window);
  const double lambda = 1.0 / static_cast<double>(window);
  for (std::size_t t = window; t < rs_variance.size(); ++t) {
    vol[t] = std::sqrt(v);
    v = (1.0 - lambda) * v + lambda * rs_variance[t];
  }
  return vol;
}

RegimeMasks regime_split(std::span<const double> vols) { return median_split(vols); }

void derive(OhlcSeries& series, std::size_t window) {
  if (series.size() <= window) throw Error("series too short");
  series.rs_variance.clear();
  series.rs_variance.reserve(series.size());
  for (const auto& b : series.bars) series.rs_variance.push_back(rogers_satchell(b));
  series.ema_vol = ema_vol(series.rs_variance, window);
  series.regimes = regime_split(series.ema_vol);
}

OhlcSeries make_series(std::vector<OhlcBar> bars, std::size_t window) {
  for (std::size_t i = 0; i < bars.size(); ++i) validate(bars[i], "bar " + std::to_string(i) + ": ");
  OhlcSeries s;
  s.bars = std::move(bars);
  derive(s, window);
  return s;
}

std::vector<double> window_returns(std::span<const double> closes, std::size_t horizon,
                                   const std::vector<bool>& mask) {
  if (horizon == 0) throw Error("horizon must be at least one day");
  if (!mask.empty() && mask.size() != closes.size()) throw Error("regime mask size mismatch");
  std::vector<double> r;
  for (std::size_t t = 0; t + horizon < closes.size(); ++t) {
    if (!mask.empty() && !mask[t]) continue;
    r.push_back(closes[t + horizon] / closes[t] - 1.0);
  }
  return r;
}

SampleSet build_return_windows(const OhlcSeries& series, std::size_t horizon, Regime regime) {
  if (horizon < 1 || horizon > 60) throw Error("horizon must lie in [1, 60] days");
  std::vector<bool> mask;
  if (regime != Regime::all) {
    if (series.regimes.high.size() != series.size()) throw Error("regime labels not available");
    mask = series.regimes.mask(regime);
  }
  const auto raw = window_returns(series.closes(), horizon, mask);
  if (raw.size() < kMinWindows) throw Error("insufficient windows");
  return standardize(raw, static_cast<int>(horizon), regime, "ohlc");
}

std::vector<OhlcBar> synthesize_ohlc(std::span<const double> daily_returns, double start_price,
                                     double intraday_vol, std::uint64_t seed) {
  if (!(start_price > 0.0)) throw Error("start price must be positive");
  constexpr int kSubsteps = 16;
  std::vector<OhlcBar> bars;
  bars.reserve(daily_returns.size());
  const std::chrono::sys_days epoch{std::chrono::year{1970} / 1 / 1};
  double prev = start_price;
  CounterStream rng(seed, 0, StreamDomain::intraday);
  for (std::size_t t = 0; t < daily_returns.size(); ++t) {
    OhlcBar b;
    b.date = std::chrono::year_month_day{epoch + std::chrono::days{static_cast<int>(t)}};
    b.open = prev;
    b.close = prev * (1.0 + daily_returns[t]);
    if (!(b.close > 0.0)) throw Error("synthetic close is not positive");
    const double step_sd = b.open * intraday_vol / std::sqrt(static_cast<double>(kSubsteps));
    double walk[kSubsteps + 1];
    walk[0] = 0.0;
    for (int k = 1; k <= kSubsteps; ++k) walk[k] = walk[k - 1] + step_sd * rng.normal();
    b.high = std::max(b.open, b.close);
    b.low = std::min(b.open, b.close);
    for (int k = 1; k < kSubsteps; ++k) {
      const double frac = static_cast<double>(k) / kSubsteps;
      const double price = b.open + (b.close - b.open) * frac + walk[k] - frac * walk[kSubsteps];
      b.high = std::max(b.high, price);
      if (price > 0.0) b.low = std::min(b.low, price);
    }
    bars.push_back(b);
    prev = b.close;
  }
  return bars;
}

}  // namespace fairsmile
