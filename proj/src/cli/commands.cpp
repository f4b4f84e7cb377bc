#include "fairsmile/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "fairsmile/core.hpp"
#include "fairsmile/ensemble_io.hpp"
#include "fairsmile/hedge.hpp"
#include "fairsmile/marketdata.hpp"
#include "fairsmile/models.hpp"
#include "fairsmile/parallel.hpp"
#include "fairsmile/pricing.hpp"
#include "fairsmile/smile.hpp"
#include "tables.hpp"

namespace fairsmile::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::vector<int> parse_horizons(const std::string& text) {
  auto to_int = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw Error("bad horizon list '" + text + "'");
    }
    return v;
  };
  std::vector<int> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto dash = item.find('-', 1);
    if (dash == std::string_view::npos) {
      out.push_back(to_int(item));
    } else {
      const int lo = to_int(item.substr(0, dash));
      const int hi = to_int(item.substr(dash + 1));
      if (hi < lo) throw Error("bad horizon range '" + std::string(item) + "'");
      for (int t = lo; t <= hi; ++t) out.push_back(t);
    }
  }
  if (out.empty()) throw Error("horizon list is empty");
  for (int t : out) {
    if (t < 1) throw Error("horizons must be at least 1 day");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// ---------------------------------------------------------------- options --

struct Common {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output;
  std::string format = "csv";

  [[nodiscard]] Format table_format() const { return format == "json" ? Format::json : Format::csv; }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Random seed (simulation noise, bootstrap resamples)")
      ->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads; 0 = runtime default. Output does not depend on it")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--output", c.output, "Output file; tables go to stdout when omitted");
  app->add_option("--format", c.format, "Table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  // Merged into the argument list by expand_config before parsing.
  app->add_option("--config", "Config file (TOML/INI keys = flag names; flags override it)")
      ->check(CLI::ExistingFile);
}

struct EstimationOptions {
  std::string methods = "exotic_mc";
  std::string regime = "all";
  int n_boot = 200;
  int block_length = 1;
  std::vector<double> deltas;
  int extrapolation_order = 4;
  bool no_hedge = false;
  std::optional<double> hedge_vol;
  std::size_t rebalance_every = 1;
  std::vector<double> moneyness{std::begin(kDefaultFitGrid), std::end(kDefaultFitGrid)};
};

void add_estimation(CLI::App* app, EstimationOptions& o, bool with_regime) {
  app->add_option("--methods", o.methods, "Comma list of exotic_mc, iv_fit, edgeworth")
      ->capture_default_str();
  if (with_regime) {
    app->add_option("--regime", o.regime, "Path regime: all, high or low (ensembles only)")
        ->check(CLI::IsMember({"all", "high", "low", "high_vol", "low_vol"}))
        ->capture_default_str();
  }
  app->add_option("--n-boot", o.n_boot, "Bootstrap resamples (>= 100)")->capture_default_str();
  app->add_option("--block-length", o.block_length,
                  "Bootstrap block length in windows; 1 = iid, 0 = the horizon T")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app->add_option("--deltas", o.deltas,
                  "No-move window widths, decreasing, in units of the return std (default scales with N)")
      ->delimiter(',');
  app->add_option("--extrapolation-order", o.extrapolation_order,
                  "Polynomial order in delta for the zero-width extrapolation")
      ->check(CLI::IsMember({2, 4}))
      ->capture_default_str();
  app->add_flag("--no-hedge", o.no_hedge, "Plain Monte Carlo (no delta-hedge control variate)");
  app->add_option("--hedge-vol", o.hedge_vol, "Hedge vol per sqrt(day); default = realized");
  app->add_option("--rebalance-every", o.rebalance_every, "Hedge rebalancing interval in steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--moneyness", o.moneyness, "Moneyness grid for iv_fit, |M| <= 1.5")
      ->delimiter(',');
}

std::vector<SmileMethod> parse_methods(const std::string& text) {
  std::vector<SmileMethod> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "exotic_mc") {
      out.push_back(SmileMethod::exotic_mc);
    } else if (item == "iv_fit") {
      out.push_back(SmileMethod::iv_fit);
    } else if (item == "edgeworth") {
      out.push_back(SmileMethod::edgeworth);
    } else {
      throw CLI::ValidationError("--methods", "unknown method '" + item + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--methods", "no method given");
  return out;
}

HedgeConfig hedge_config(const EstimationOptions& o) {
  HedgeConfig h;
  h.enabled = !o.no_hedge;
  h.hedge_vol = o.hedge_vol;
  h.rebalance_every = o.rebalance_every;
  validate(h);
  return h;
}

KernelConfig kernel_config(const EstimationOptions& o, std::size_t n) {
  KernelConfig k = o.deltas.empty() ? default_kernel_config(n) : KernelConfig{o.deltas, 4};
  k.extrapolation_order = o.extrapolation_order;
  validate(k);
  return k;
}

BootstrapOptions bootstrap_options(const EstimationOptions& o, const Common& c, int horizon) {
  BootstrapOptions b;
  b.n_boot = o.n_boot;
  b.seed = c.seed;
  b.block_length = static_cast<std::size_t>(o.block_length == 0 ? horizon : o.block_length);
  return b;
}

// ------------------------------------------------------------------ I/O --

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

fs::path sidecar_path(const fs::path& data) {
  fs::path p = data;
  return p.extension() == ".csv" ? p.replace_extension(".json") : fs::path(data.string() + ".json");
}

void emit(const Table& t, const Common& c, std::ostream& out) {
  if (c.output.empty()) {
    write_table(out, t, c.table_format());
    return;
  }
  std::ofstream file(c.output);
  if (!file) throw Error("cannot write '" + c.output + "'");
  write_table(file, t, c.table_format());
}

bool is_ensemble_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  char magic[8] = {};
  in.read(magic, sizeof magic);
  return in.gcount() == 8 && std::equal(magic, magic + 8, kEnsembleMagic);
}

void write_samples(const fs::path& path, const SampleSet& s, const json& extra) {
  {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "u\n";
    for (double u : s.samples) out << format_number(u) << '\n';
  }
  json meta;
  meta["horizon_days"] = s.horizon_days;
  meta["regime"] = std::string(to_string(s.regime));
  meta["source"] = s.source;
  meta["count"] = s.size();
  meta["location"] = s.location;
  meta["scale"] = s.scale;
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  meta["created"] = utc_timestamp();
  write_json_file(sidecar_path(path), meta);
}

SampleSet read_samples(const fs::path& path, int fallback_horizon) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  SampleSet s;
  s.horizon_days = fallback_horizon;
  s.source = path.stem().string();
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "u") {
        throw Error(path.string() + ": line " + std::to_string(line_no) +
                    ": expected header 'u' (or a binary ensemble file)");
      }
      header = true;
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size() || !std::isfinite(v)) {
      throw Error(path.string() + ": line " + std::to_string(line_no) + ": unparseable value '" +
                  line + "'");
    }
    s.samples.push_back(v);
  }
  if (s.samples.size() < 2) throw Error(path.string() + ": insufficient samples");

  const auto meta_path = sidecar_path(path);
  if (fs::exists(meta_path)) {
    std::ifstream mf(meta_path);
    json meta;
    try {
      meta = json::parse(mf);
      s.horizon_days = meta.value("horizon_days", s.horizon_days);
      s.regime = parse_regime(meta.value("regime", std::string("all")));
      s.source = meta.value("source", s.source);
      s.location = meta.value("location", 0.0);
      s.scale = meta.value("scale", 1.0);
    } catch (const json::exception& e) {
      throw Error(meta_path.string() + ": " + e.what());
    }
  }
  return s;
}

// ---------------------------------------------------------------- estimate --

const std::vector<std::string> kEstimateColumns = {
    "source", "regime", "T", "method", "n", "alpha", "alpha_se", "beta", "beta_se",
    "gamma", "gamma_se", "skew_over_6", "skew_over_6_se", "kurt_over_24",
    "kurt_over_24_se", "median", "median_se"};

struct MomentRow {
  MomentSummary m;
  double skew_se = 0.0;
  double kurt_se = 0.0;
  double median_se = 0.0;
};

MomentRow moment_row(const SampleSet& s, const BootstrapOptions& boot) {
  MomentRow r;
  r.m = compute_moments(s);
  const auto se = bootstrap_se(
      [](std::span<const double> x) {
        const auto z = standardize(x, 1);
        const auto m = compute_moments(z);
        return std::vector<double>{m.skewness / 6.0, m.excess_kurtosis / 24.0, m.median};
      },
      s.values(), boot);
  r.skew_se = se[0];
  r.kurt_se = se[1];
  r.median_se = se[2];
  return r;
}

void add_estimate_row(Table& t, const std::string& source, Regime regime, int horizon,
                      std::size_t n, const SmileCoefficients& c, const MomentRow& m) {
  t.add({source, std::string(to_string(regime)), static_cast<long long>(horizon),
         std::string(to_string(c.method)), static_cast<long long>(n), c.alpha, c.alpha_se,
         c.beta, c.beta_se, c.gamma, c.gamma_se, m.m.skewness / 6.0, m.skew_se,
         m.m.excess_kurtosis / 24.0, m.kurt_se, m.m.median, m.median_se});
}

SmileCoefficients edgeworth_row(const MomentRow& m) {
  auto c = edgeworth_coefficients(m.m);
  c.alpha_se = m.kurt_se;
  c.beta_se = m.skew_se;
  c.gamma_se = m.kurt_se;
  return c;
}

PathEnsemble one_step_ensemble(const SampleSet& s) {
  PathEnsemble e;
  e.n_paths = s.size();
  e.n_steps = 1;
  e.step_days = s.horizon_days;
  e.returns = s.samples;
  e.model_tag = s.source;
  return e;
}

SmileCoefficients iv_fit(const PathEnsemble& e, const EstimationOptions& o, std::size_t horizon) {
  const auto curve = smile_from_paths(e, o.moneyness, hedge_config(o), horizon);
  return fit_smile_quadratic(curve);
}

// Rows for one standardized sample set (market data, or an ensemble reduced
// to its terminal returns).
void estimate_samples(Table& t, const SampleSet& s, const std::vector<SmileMethod>& methods,
                      const EstimationOptions& o, const Common& c) {
  const auto boot = bootstrap_options(o, c, s.horizon_days);
  const auto moments = moment_row(s, boot);
  for (auto method : methods) {
    SmileCoefficients coef;
    switch (method) {
      case SmileMethod::exotic_mc:
        coef = estimate_smile(s, kernel_config(o, s.size()), boot);
        break;
      case SmileMethod::iv_fit:
        coef = iv_fit(one_step_ensemble(s), o, 1);
        break;
      case SmileMethod::edgeworth:
        coef = edgeworth_row(moments);
        break;
    }
    coef.method = method;
    add_estimate_row(t, s.source, s.regime, s.horizon_days, s.size(), coef, moments);
  }
}

void estimate_ensemble(Table& t, const PathEnsemble& full, const std::vector<int>& horizons,
                       Regime regime, const std::vector<SmileMethod>& methods,
                       const EstimationOptions& o, const Common& c, std::ostream& err) {
  const PathEnsemble sel = regime == Regime::all ? full : select_regime(full, regime);
  const auto source = full.model_tag;
  for (int horizon : horizons) {
    if (static_cast<std::size_t>(horizon) > sel.n_steps) {
      throw Error("horizon " + std::to_string(horizon) + " exceeds the ensemble length " +
                  std::to_string(sel.n_steps));
    }
    err << "estimate: T=" << horizon << " (" << sel.n_paths << " paths)\n";
    const auto h = static_cast<std::size_t>(horizon);
    const auto samples = ensemble_samples(sel, h);
    const auto moments = moment_row(samples, bootstrap_options(o, c, horizon));
    for (auto method : methods) {
      SmileCoefficients coef;
      switch (method) {
        case SmileMethod::exotic_mc:
          coef = price_smile_exotics(sel, kernel_config(o, sel.n_paths), hedge_config(o), h)
                     .coefficients;
          break;
        case SmileMethod::iv_fit:
          coef = iv_fit(sel, o, h);
          break;
        case SmileMethod::edgeworth:
          coef = edgeworth_row(moments);
          break;
      }
      coef.method = method;
      add_estimate_row(t, source, regime, horizon, sel.n_paths, coef, moments);
    }
  }
}

Table new_estimate_table() {
  Table t;
  t.columns = kEstimateColumns;
  return t;
}

// ------------------------------------------------------------------ report --

Cell numeric_cell(const std::string& text) {
  if (text.empty()) return std::monostate{};
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    if (text == "nan") return std::nan("");
    throw Error("unparseable number '" + text + "'");
  }
  return v;
}

struct LongRow {
  std::string source, regime;
  long long horizon = 0;
  std::string method, quantity;
  Cell value, se;
};

void append_long(std::vector<LongRow>& rows, std::map<std::string, bool>& seen_moments,
                 const CsvText& wide, const std::string& origin) {
  const auto c_source = wide.column("source");
  const auto c_regime = wide.column("regime");
  const auto c_t = wide.column("T");
  const auto c_method = wide.column("method");
  for (const auto& r : wide.rows) {
    LongRow base;
    base.source = r[c_source];
    base.regime = r[c_regime];
    try {
      base.horizon = std::stoll(r[c_t]);
    } catch (const std::exception&) {
      throw Error(origin + ": bad horizon '" + r[c_t] + "'");
    }
    for (const char* q : {"alpha", "beta", "gamma"}) {
      LongRow row = base;
      row.method = r[c_method];
      row.quantity = q;
      row.value = numeric_cell(r[wide.column(q)]);
      row.se = numeric_cell(r[wide.column(std::string(q) + "_se")]);
      rows.push_back(std::move(row));
    }
    const auto key = base.source + '\x1f' + base.regime + '\x1f' + r[c_t];
    if (seen_moments[key]) continue;
    seen_moments[key] = true;
    for (const char* q : {"skew_over_6", "kurt_over_24", "median"}) {
      LongRow row = base;
      row.method = "moments";
      row.quantity = q;
      row.value = numeric_cell(r[wide.column(q)]);
      row.se = numeric_cell(r[wide.column(std::string(q) + "_se")]);
      rows.push_back(std::move(row));
    }
  }
}

Table long_table(std::vector<LongRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const LongRow& a, const LongRow& b) {
    return std::tie(a.source, a.regime, a.horizon) < std::tie(b.source, b.regime, b.horizon);
  });
  Table t;
  t.columns = {"source", "regime", "T", "method", "quantity", "value", "se"};
  for (auto& r : rows) {
    t.add({r.source, r.regime, r.horizon, r.method, r.quantity, r.value, r.se});
  }
  return t;
}

std::vector<Regime> parse_regimes(const std::string& text) {
  std::vector<Regime> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_regime(item));
  if (out.empty()) throw Error("no regime given");
  return out;
}

std::vector<double> default_edgeworth_grid() {
  std::vector<double> m;
  for (int i = -6; i <= 6; ++i) m.push_back(0.25 * i);
  return m;
}

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Keys of the config file (top level or in a [subcommand] section) become
// flags unless the same flag is already on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
  }
  if (file.empty() || args.empty()) return args;
  if (!fs::exists(file)) return args;  // the option's own check reports it
  const std::string& sub = args.front();
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(file);
  } catch (const CLI::ParseError& e) {
    throw CLI::ValidationError("--config", e.what());
  }
  std::vector<std::string> out(args.begin(), args.begin() + 1);
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents.front() == sub)) {
      continue;
    }
    const auto flag = "--" + item.name;
    if (flag == "--config" || flag_given(args, flag)) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") out.push_back(flag);
      continue;
    }
    std::string joined;
    for (const auto& v : item.inputs) joined += (joined.empty() ? "" : ",") + v;
    if (item.inputs.size() > 1 && (flag == "--input")) {
      for (const auto& v : item.inputs) {
        out.push_back(flag);
        out.push_back(v);
      }
      continue;
    }
    out.push_back(flag);
    out.push_back(joined);
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

constexpr const char* kEstimateFooter =
    "Output columns (one row per horizon and method):\n"
    "  source, regime, T [days], method, n [samples or paths],\n"
    "  alpha, beta, gamma [dimensionless; implied vol / sigma = alpha + beta M + gamma M^2,\n"
    "  M = (K - S0) / (S0 sigma sqrt(T))], *_se [bootstrap or Monte Carlo standard errors],\n"
    "  skew_over_6 = S_T/6, kurt_over_24 = excess kurtosis/24, median [of standardized u].";

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair volatility-smile coefficients from simulated or market returns", "fairsmile"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // simulate
  Common sim_c;
  std::string model, csv_export;
  double vol = 0.01, epsilon = 0.1, theta = 0.0, omega = 0.1, rho = 0.9, nu = 0.1;
  std::size_t paths = 100000, horizon = 20;
  auto* sim = app.add_subcommand("simulate", "Simulate a return-path ensemble to a binary file");
  add_common(sim, sim_c);
  sim->add_option("--model", model, "gaussian, nonlinear or gaarch")
      ->required()
      ->check(CLI::IsMember({"gaussian", "nonlinear", "gaarch"}));
  sim->add_option("--vol", vol, "Base daily vol sigma [per sqrt(day)]")->capture_default_str();
  sim->add_option("--epsilon", epsilon, "Nonlinear leverage amplitude")->capture_default_str();
  sim->add_option("--theta", theta, "Nonlinear leverage threshold")->capture_default_str();
  sim->add_option("--omega", omega, "Leverage memory rate [1/day], < 1")->capture_default_str();
  sim->add_option("--rho", rho, "GAARCH persistence")->capture_default_str();
  sim->add_option("--nu", nu, "GAARCH feedback strength")->capture_default_str();
  sim->add_option("--paths", paths, "Number of paths")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--horizon", horizon, "Path length [days]")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--csv-export", csv_export, "Also write the return matrix as CSV (rows = paths)");
  sim->footer(
      "Writes the binary ensemble to --output (required) plus a JSON sidecar <output>.json.\n"
      "Stdout: one summary row: file, model, n_paths, n_steps, step_days [days], seed, vol_floor_hits.");

  // estimate
  Common est_c;
  EstimationOptions est_o;
  std::string est_input, est_horizons;
  auto* est = app.add_subcommand("estimate", "Smile coefficients per horizon and method");
  add_common(est, est_c);
  est->add_option("--input", est_input, "Ensemble file or sample CSV (column u)")
      ->required()
      ->check(CLI::ExistingFile);
  est->add_option("--horizons", est_horizons,
                  "Horizons [days], e.g. 1-20 or 5,10,20; ensembles only (default: full length)");
  add_estimation(est, est_o, true);
  est->footer(kEstimateFooter);

  // edgeworth
  Common edg_c;
  EstimationOptions edg_o;
  std::string edg_input;
  int edg_horizon = 0;
  double edg_vol = 1.0;
  std::optional<double> edg_skew, edg_kurt;
  std::vector<double> edg_grid = default_edgeworth_grid();
  auto* edg = app.add_subcommand("edgeworth", "Edgeworth smile and tail versus the fair smile");
  add_common(edg, edg_c);
  auto* edg_in = edg->add_option("--input", edg_input, "Ensemble file or sample CSV")
                     ->check(CLI::ExistingFile);
  edg->add_option("--horizon", edg_horizon, "Ensemble horizon [days] (default: full length)");
  edg->add_option("--regime", edg_o.regime, "Ensemble regime: all, high or low")
      ->check(CLI::IsMember({"all", "high", "low", "high_vol", "low_vol"}));
  auto* skew_opt = edg->add_option("--skew", edg_skew, "Skewness S_T (instead of --input)");
  auto* kurt_opt = edg->add_option("--kurt", edg_kurt, "Excess kurtosis kappa_T (instead of --input)");
  skew_opt->excludes(edg_in)->needs(kurt_opt);
  kurt_opt->excludes(edg_in)->needs(skew_opt);
  edg->add_option("--vol", edg_vol, "sigma used to scale implied vols")->capture_default_str();
  edg->add_option("--moneyness", edg_grid, "Moneyness grid, |M| <= 1.5")->delimiter(',');
  edg->add_option("--deltas", edg_o.deltas, "No-move window widths")->delimiter(',');
  edg->footer(
      "Output columns: moneyness M, edgeworth_iv = vol (1 + S/6 M + kappa/24 (M^2 - 1)),\n"
      "fair_iv = vol (alpha + beta M + gamma M^2), edgeworth_tail and empirical_tail = P(u > M).\n"
      "fair_iv and empirical_tail are empty without --input.");

  // ingest
  Common ing_c;
  std::string ing_input, ing_dir, ing_horizons = "1-20", ing_regimes = "high,low";
  auto* ing = app.add_subcommand("ingest", "OHLC CSV to per-regime standardized return samples");
  add_common(ing, ing_c);
  ing->add_option("--input", ing_input, "CSV with header date,open,high,low,close")
      ->required()
      ->check(CLI::ExistingFile);
  ing->add_option("--dir", ing_dir, "Directory for the sample files")->required();
  ing->add_option("--horizons", ing_horizons, "Horizons [days] in 1..60")->capture_default_str();
  ing->add_option("--regimes", ing_regimes, "Comma list of all, high, low")->capture_default_str();
  ing->footer(
      "Writes <dir>/samples_<regime>_T<T>.csv (column u) with a JSON sidecar each.\n"
      "Output columns: regime, T [days], n [windows], location, scale [raw return units], file.");

  // report
  Common rep_c;
  EstimationOptions rep_o;
  rep_o.methods = "exotic_mc,edgeworth";
  std::vector<std::string> rep_inputs;
  std::string rep_ohlc, rep_horizons = "1-20", rep_regimes = "high,low";
  auto* rep = app.add_subcommand("report", "Long-format comparison table across regimes and horizons");
  add_common(rep, rep_c);
  auto* rep_in = rep->add_option("--input", rep_inputs, "Estimate tables (CSV) to combine")
                     ->check(CLI::ExistingFile);
  auto* rep_oh = rep->add_option("--ohlc", rep_ohlc, "OHLC CSV: ingest and estimate in one go")
                     ->check(CLI::ExistingFile);
  rep_in->excludes(rep_oh);
  rep->add_option("--horizons", rep_horizons, "Horizons for --ohlc [days]")->capture_default_str();
  rep->add_option("--regimes", rep_regimes, "Regimes for --ohlc")->capture_default_str();
  add_estimation(rep, rep_o, false);
  rep->footer(
      "Output columns: source, regime, T [days], method, quantity, value, se.\n"
      "Quantities alpha, beta, gamma per method; skew_over_6, kurt_over_24, median under method\n"
      "'moments'. All values are dimensionless.");

  try {
    const auto expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (sim->parsed()) {
      set_thread_count(sim_c.threads);
      if (sim_c.output.empty()) throw CLI::RequiredError("--output");
      PathEnsemble e;
      json params;
      if (model == "gaussian") {
        e = simulate_gaussian(vol, horizon, paths, sim_c.seed);
        params["vol"] = vol;
      } else if (model == "nonlinear") {
        const NonlinearLeverageParams p{vol, epsilon, theta, omega};
        e = simulate_nonlinear_leverage(p, horizon, paths, sim_c.seed);
        params = {{"vol", vol}, {"epsilon", epsilon}, {"theta", theta}, {"omega", omega}};
      } else {
        const GaarchParams p{vol, rho, nu};
        e = simulate_gaarch(p, horizon, paths, sim_c.seed);
        params = {{"vol", vol}, {"rho", rho}, {"nu", nu}};
        if (e.vol_floor_hits > 0) {
          err << "warning: GAARCH vol floor hit " << e.vol_floor_hits << " times\n";
        }
      }
      write_ensemble(fs::path(sim_c.output), e);
      if (!csv_export.empty()) write_ensemble_csv(csv_export, e);
      json meta{{"model", model},
                {"parameters", params},
                {"n_paths", e.n_paths},
                {"n_steps", e.n_steps},
                {"step_days", e.step_days},
                {"seed", e.seed},
                {"vol_floor_hits", e.vol_floor_hits},
                {"created", utc_timestamp()}};
      write_json_file(sim_c.output + ".json", meta);
      Table t;
      t.columns = {"file", "model", "n_paths", "n_steps", "step_days", "seed", "vol_floor_hits"};
      t.add({sim_c.output, model, static_cast<long long>(e.n_paths),
             static_cast<long long>(e.n_steps), e.step_days, static_cast<long long>(e.seed),
             static_cast<long long>(e.vol_floor_hits)});
      write_table(out, t, sim_c.table_format());
      return kExitOk;
    }

    if (est->parsed()) {
      set_thread_count(est_c.threads);
      const auto methods = parse_methods(est_o.methods);
      auto t = new_estimate_table();
      if (is_ensemble_file(est_input)) {
        const auto e = read_ensemble(fs::path(est_input));
        const auto horizons = est_horizons.empty()
                                  ? std::vector<int>{static_cast<int>(e.n_steps)}
                                  : parse_horizons(est_horizons);
        estimate_ensemble(t, e, horizons, parse_regime(est_o.regime), methods, est_o, est_c, err);
      } else {
        if (est_o.regime != "all") {
          throw CLI::ValidationError("--regime", "sample files carry their own regime");
        }
        const auto s = read_samples(est_input, 1);
        if (!est_horizons.empty()) {
          const auto hs = parse_horizons(est_horizons);
          if (hs.size() != 1 || hs.front() != s.horizon_days) {
            throw CLI::ValidationError("--horizons", "sample file has horizon " +
                                                         std::to_string(s.horizon_days));
          }
        }
        estimate_samples(t, s, methods, est_o, est_c);
      }
      emit(t, est_c, out);
      return kExitOk;
    }

    if (edg->parsed()) {
      set_thread_count(edg_c.threads);
      if (!edg_skew && edg_input.empty()) {
        throw CLI::RequiredError("--input or --skew/--kurt");
      }
      MomentSummary m;
      std::optional<SampleSet> s;
      if (edg_skew) {
        m.skewness = *edg_skew;
        m.excess_kurtosis = *edg_kurt;
      } else {
        if (is_ensemble_file(edg_input)) {
          const auto e = read_ensemble(fs::path(edg_input));
          const auto r = parse_regime(edg_o.regime);
          const auto sel = r == Regime::all ? e : select_regime(e, r);
          const auto h = edg_horizon > 0 ? static_cast<std::size_t>(edg_horizon) : e.n_steps;
          s = ensemble_samples(sel, h, Regime::all);
          s->regime = r;
        } else {
          s = read_samples(edg_input, 1);
        }
        m = compute_moments(*s);
      }
      std::optional<SmileCoefficients> fair;
      if (s) {
        const auto k = kernel_config(edg_o, s->size());
        fair = SmileCoefficients{alpha_hat(*s), beta_hat(*s), gamma_hat(*s, k)};
      }
      Table t;
      t.columns = {"moneyness", "edgeworth_iv", "fair_iv", "edgeworth_tail", "empirical_tail"};
      std::vector<std::string> warnings;
      for (double x : edg_grid) {
        if (!(std::abs(x) <= 1.5)) throw Error("moneyness outside the expansion region |M| <= 1.5");
        const auto ew = edgeworth_smile(m, edg_vol, x);
        if (warnings.empty()) warnings = ew.warnings;
        Cell fair_iv, emp_tail;
        if (fair) {
          fair_iv = edg_vol * (fair->alpha + fair->beta * x + fair->gamma * x * x);
          const auto above = std::count_if(s->samples.begin(), s->samples.end(),
                                           [x](double u) { return u > x; });
          emp_tail = static_cast<double>(above) / static_cast<double>(s->size());
        }
        t.add({x, ew.implied_vol, fair_iv, edgeworth_tail(m, x), emp_tail});
      }
      for (const auto& w : warnings) err << "warning: " << w << '\n';
      emit(t, edg_c, out);
      return kExitOk;
    }

    if (ing->parsed()) {
      set_thread_count(ing_c.threads);
      const auto series = parse_ohlc_csv(ing_input);
      const auto horizons = parse_horizons(ing_horizons);
      const auto regimes = parse_regimes(ing_regimes);
      fs::create_directories(ing_dir);
      Table t;
      t.columns = {"regime", "T", "n", "location", "scale", "file"};
      for (auto regime : regimes) {
        for (int h : horizons) {
          auto s = build_return_windows(series, static_cast<std::size_t>(h), regime);
          s.source = fs::path(ing_input).stem().string();
          const auto file = fs::path(ing_dir) /
                            ("samples_" + std::string(to_string(regime)) + "_T" +
                             std::to_string(h) + ".csv");
          write_samples(file, s,
                        json{{"ohlc_file", ing_input},
                             {"overlapping_windows", true},
                             {"regime_median_vol", series.regimes.median_vol}});
          t.add({std::string(to_string(regime)), static_cast<long long>(h),
                 static_cast<long long>(s.size()), s.location, s.scale, file.string()});
        }
      }
      emit(t, ing_c, out);
      return kExitOk;
    }

    if (rep->parsed()) {
      set_thread_count(rep_c.threads);
      std::vector<LongRow> rows;
      std::map<std::string, bool> seen;
      if (!rep_ohlc.empty()) {
        const auto methods = parse_methods(rep_o.methods);
        const auto series = parse_ohlc_csv(rep_ohlc);
        if (rep_o.block_length == 1) {
          err << "note: overlapping windows with iid bootstrap understate errors; "
                 "see --block-length\n";
        }
        auto wide = new_estimate_table();
        for (auto regime : parse_regimes(rep_regimes)) {
          for (int h : parse_horizons(rep_horizons)) {
            err << "report: regime " << to_string(regime) << " T=" << h << '\n';
            auto s = build_return_windows(series, static_cast<std::size_t>(h), regime);
            s.source = fs::path(rep_ohlc).stem().string();
            estimate_samples(wide, s, methods, rep_o, rep_c);
          }
        }
        std::stringstream buf;
        write_table(buf, wide, Format::csv);
        append_long(rows, seen, read_csv(buf), rep_ohlc);
      } else {
        if (rep_inputs.empty()) throw CLI::RequiredError("--input or --ohlc");
        for (const auto& path : rep_inputs) {
          std::ifstream in(path);
          if (!in) throw Error("cannot open '" + path + "'");
          try {
            append_long(rows, seen, read_csv(in), path);
          } catch (const Error& e) {
            throw Error(path + ": " + e.what());
          }
        }
      }
      if (rows.empty()) throw Error("no estimate rows in the inputs");
      emit(long_table(std::move(rows)), rep_c, out);
      return kExitOk;
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace fairsmile::cli
