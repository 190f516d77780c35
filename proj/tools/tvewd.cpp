// tvewd: decompose, forecast, benchmark and simulate from the command line.

#include <CLI11.hpp>
#include <json.hpp>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tvewd/benchmarks.hpp"
#include "tvewd/error.hpp"
#include "tvewd/eval.hpp"
#include "tvewd/ewd.hpp"
#include "tvewd/forecaster.hpp"
#include "tvewd/series.hpp"
#include "tvewd/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tvewd;

namespace {

constexpr const char* kVersion = "0.1.0";

enum class Level { error, warn, info, debug };
Level g_level = Level::info;

void log(Level l, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (l <= g_level) std::cerr << "tvewd [" << names[static_cast<int>(l)] << "] " << msg << '\n';
}

// Bad flags, paths or parameter ranges: exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Estimation failure tagged with where it happened: exit 1.
struct RunError : std::runtime_error {
  RunError(const std::string& stage, const std::string& series, const std::string& what)
      : std::runtime_error("[stage=" + stage + " series=" + series + "] " + what) {}
};

struct Settings {
  std::string input, column, output = "tvewd-out", transform = "none", preset;
  std::string log_level = "info";
  int threads = 0;

  int scales = 5, lags = 2;
  std::vector<int> horizons{1};
  double trend_bw = 0.6, ma_bw = 0.2;
  std::size_t kmax = 0, n_trunc = 0, grid_points = 0, k_ref = 1;
  std::string kernel = "epanechnikov", trend_model = "tvar1-trend";
  bool bandwidth_cv = false, trend_bw_cv = false, allow_nonstationary = false;
  bool include_residual = false;
  std::vector<double> cv_grid;

  std::size_t split = 0;
  bool recursive = false, keep_forecasts = false, allow_failures = false;
  std::vector<std::string> models{"ar3", "har", "tvar3", "tvhar", "ewd", "tvewd"};
  std::string baseline;
  std::vector<std::string> periods;
  std::vector<std::string> schedule;  // "h:J:p"
  double tv_bw = 0.3;

  std::string dgp = "a";
  std::size_t length = 1500;
  std::uint64_t seed = 1, stream = 0;
};

void apply_preset(const std::string& name, Settings& s) {
  if (name == "inflation-pce") {
    s.scales = 5;
    s.lags = 2;
    s.trend_bw = 0.6;
    s.ma_bw = 0.2;
    s.split = 645;
    s.horizons = {1, 2, 6, 12};
    s.models = {"ar3", "ewd", "tvar3", "tvhar", "tvewd"};
    s.baseline = "ar3";
    s.tv_bw = 0.3;
    s.transform = "logdiff";
  } else if (name == "rv-sp500") {
    s.scales = 5;
    s.lags = 2;
    s.trend_bw = 0.6;
    s.ma_bw = 0.2;
    s.split = 1000;
    s.horizons = {1, 5, 22};
    s.schedule = {"1:5:2", "5:5:5", "22:7:15"};
    s.models = {"har", "ewd", "tvar3", "tvhar", "tvewd"};
    s.baseline = "har";
    s.tv_bw = 0.3;
    s.periods = {"2009-2012:2009-08:2012-08", "2016-2017:2016-08:2017-08"};
    s.transform = "none";
  } else {
    throw ConfigError("unknown preset '" + name + "' (inflation-pce, rv-sp500)");
  }
}

// Presets sit below the config file and flags, so they are applied before parsing.
std::optional<std::string> scan_preset(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--preset" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--preset=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

Level parse_level(const std::string& s) {
  if (s == "error") return Level::error;
  if (s == "warn") return Level::warn;
  if (s == "info") return Level::info;
  if (s == "debug") return Level::debug;
  throw ConfigError("unknown log level '" + s + "'");
}

std::vector<std::tuple<int, int, int>> parse_schedule(const std::vector<std::string>& items) {
  std::vector<std::tuple<int, int, int>> out;
  for (const auto& item : items) {
    int h = 0, j = 0, p = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(item);
    if (!(is >> h >> c1 >> j >> c2 >> p) || c1 != ':' || c2 != ':' || h < 1 || j < 1 || p < 1) {
      throw ConfigError("bad --schedule entry '" + item + "' (expected h:J:p)");
    }
    out.emplace_back(h, j, p);
  }
  return out;
}

ForecastConfig forecast_config(const Settings& s) {
  ForecastConfig c;
  c.scales = s.scales;
  c.lags = s.lags;
  c.horizon = s.horizons.empty() ? 1 : s.horizons.front();
  c.trend_bandwidth = s.trend_bw;
  c.ma_bandwidth = s.ma_bw;
  c.kernel = Kernel::from_name(s.kernel);
  c.kmax = s.kmax;
  c.truncation = s.n_trunc;
  c.trend_model = trend_model_from_name(s.trend_model);
  c.cv_ma_bandwidth = s.bandwidth_cv;
  c.cv_trend_bandwidth = s.trend_bw_cv;
  if (!s.cv_grid.empty()) c.cv_candidates = s.cv_grid;
  c.grid_points = s.grid_points;
  c.allow_nonstationary = s.allow_nonstationary;
  c.include_residual = s.include_residual;
  c.parallel = true;
  return c;
}

TvEwdSchedule tvewd_schedule(const Settings& s) {
  TvEwdSchedule sch;
  sch.base = forecast_config(s);
  sch.per_horizon = parse_schedule(s.schedule);
  return sch;
}

std::vector<ModelSpec> model_specs(const Settings& s, const std::vector<std::string>& names) {
  std::vector<ModelSpec> specs;
  for (const auto& n : names) {
    ModelSpec m;
    m.name = n;
    m.tv_bandwidth = s.tv_bw;
    m.ewd_scales = s.scales;
    m.ewd_lags = s.lags;
    m.ewd_kmax = s.kmax;
    m.tvewd = tvewd_schedule(s);
    m.recursive = s.recursive;
    specs.push_back(std::move(m));
  }
  return specs;
}

TimeSeries transform(const TimeSeries& x, const std::string& how) {
  if (how == "none") return x;
  if (how == "logdiff") return log_difference(x);
  if (how == "log") {
    std::vector<double> v(x.values().begin(), x.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0)) throw DomainError("log transform needs positive values (position " + std::to_string(i) + ")");
      v[i] = std::log(v[i]);
    }
    return TimeSeries(std::move(v), x.labels(), x.frequency());
  }
  throw ConfigError("unknown transform '" + how + "' (none, log, logdiff)");
}

// Validation that needs no data: every range check runs before any estimation.
void validate(const Settings& s, const std::string& sub) {
  if (sub != "simulate") {
    if (s.input.empty()) throw ConfigError("--input is required");
    if (!fs::exists(s.input)) throw ConfigError("input file '" + s.input + "' does not exist");
  }
  if (s.threads < 0) throw ConfigError("--threads must be >= 0");
  for (int h : s.horizons)
    if (h < 1) throw ConfigError("horizons must be >= 1");
  if (s.transform != "none" && s.transform != "log" && s.transform != "logdiff") {
    throw ConfigError("unknown transform '" + s.transform + "' (none, log, logdiff)");
  }
  if (s.tv_bw <= 0.0 || s.tv_bw > 1.0) throw ConfigError("--tv-bw must lie in (0,1]");
  try {
    forecast_config(s).validate();
    tvewd_schedule(s);
    if (sub == "benchmark") parse_model_list([&] {
      std::string joined;
      for (const auto& m : s.models) joined += (joined.empty() ? "" : ",") + m;
      return joined;
    }());
    for (const auto& p : s.periods) parse_sub_period(p);
    if (s.k_ref < 1) throw DomainError("--k-ref must be >= 1");
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (sub == "benchmark" && !s.baseline.empty() &&
      std::find(s.models.begin(), s.models.end(), s.baseline) == s.models.end()) {
    throw ConfigError("baseline '" + s.baseline + "' is not among --models");
  }
}

Panel load_panel(const Settings& s) {
  Panel raw;
  try {
    if (!s.column.empty()) {
      raw = Panel::single(s.column, read_series_csv(s.input, s.column));
    } else {
      raw = read_panel_csv(s.input);
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("reading '") + s.input + "': " + e.what());
  }
  std::map<std::string, TimeSeries> out;
  for (const auto& [id, series] : raw.members()) {
    try {
      out.emplace(id, transform(series, s.transform));
    } catch (const DomainError& e) {
      throw RunError("transform", id, e.what());
    }
  }
  return Panel(std::move(out));
}

json settings_json(const Settings& s) {
  json j;
  j["input"] = s.input;
  j["column"] = s.column;
  j["output"] = s.output;
  j["transform"] = s.transform;
  j["preset"] = s.preset;
  j["threads"] = s.threads;
  j["scales"] = s.scales;
  j["lags"] = s.lags;
  j["horizons"] = s.horizons;
  j["trend_bw"] = s.trend_bw;
  j["ma_bw"] = s.ma_bw;
  j["kmax"] = s.kmax;
  j["n_trunc"] = s.n_trunc;
  j["grid_points"] = s.grid_points;
  j["k_ref"] = s.k_ref;
  j["kernel"] = s.kernel;
  j["trend_model"] = s.trend_model;
  j["bandwidth_cv"] = s.bandwidth_cv;
  j["trend_bw_cv"] = s.trend_bw_cv;
  j["cv_grid"] = s.cv_grid;
  j["allow_nonstationary_points"] = s.allow_nonstationary;
  j["include_residual"] = s.include_residual;
  j["split"] = s.split;
  j["recursive"] = s.recursive;
  j["models"] = s.models;
  j["baseline"] = s.baseline;
  j["periods"] = s.periods;
  j["schedule"] = s.schedule;
  j["tv_bw"] = s.tv_bw;
  j["dgp"] = s.dgp;
  j["t"] = s.length;
  j["seed"] = s.seed;
  j["stream"] = s.stream;
  return j;
}

void write_manifest(const fs::path& path, const std::string& sub, const Settings& s,
                    const json& effective, const std::vector<std::string>& outputs,
                    const std::string& replay_config) {
  json m;
  m["tool"] = "tvewd";
  m["version"] = kVersion;
  m["subcommand"] = sub;
  m["parameters"] = settings_json(s);
  m["effective"] = effective;
  m["outputs"] = outputs;
  m["replay"] = "tvewd " + sub + " --config " + replay_config;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << m.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << std::setprecision(12);
  return out;
}

json model_effective(const TvEwdModel& m) {
  json e;
  e["trend_bandwidth"] = m.trend().bandwidth;
  e["ma_bandwidth"] = m.tvar().ar_bandwidth;
  e["kmax"] = m.decomposition().kmax();
  e["truncation"] = m.ma().truncation();
  e["weights"] = m.weights().w;
  e["weights_r_squared"] = m.weights().r_squared;
  e["first_supported"] = m.decomposition().first_supported();
  std::size_t nonstat = 0, clamped = 0, tails = 0;
  for (std::size_t i = 0; i < m.ma().points(); ++i) {
    nonstat += !m.ma().stationary[i];
    clamped += m.ma().clamped[i];
    tails += !m.ma().tail_converged[i];
  }
  e["nonstationary_points"] = nonstat;
  e["clamped_points"] = clamped;
  e["unconverged_tail_points"] = tails;
  e["widened_windows"] = m.tvar().adjustments.size() + m.trend().adjustments.size();
  return e;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

json decompose_one(const std::string& id, const TimeSeries& x, const Settings& s,
                   const fs::path& dir, std::vector<std::string>& outputs,
                   std::map<std::string, std::vector<double>>* by_year) {
  TvEwdModel model = [&] {
    try {
      log(Level::info, "decomposing " + id + " (T=" + std::to_string(x.size()) + ")");
      return TvEwdModel::fit(x.values(), forecast_config(s));
    } catch (const StageError& e) {
      throw RunError(e.stage(), id, e.what());
    } catch (const std::exception& e) {
      throw RunError("decompose", id, e.what());
    }
  }();
  fs::create_directories(dir);
  const auto& dec = model.decomposition();
  const auto& betas = dec.betas;
  const int J = betas.scales;
  const std::size_t n = x.size();
  const bool obs_grid = betas.grid.size() == n;
  auto grid_label = [&](std::size_t g) {
    if (!obs_grid) return std::string();
    return x.label(g);
  };

  {
    auto out = open_csv(dir / "beta.csv");
    out << "u,label,scale,shift,beta\n";
    for (std::size_t g = 0; g < betas.grid.size(); ++g)
      for (int j = 1; j <= J; ++j)
        for (std::size_t k = 0; k < betas.shifts(j); ++k)
          out << betas.grid[g] << ',' << csv_field(grid_label(g)) << ',' << j << ',' << k << ','
              << betas.at(g, j, k) << '\n';
    outputs.push_back((dir / "beta.csv").string());
  }
  {
    auto out = open_csv(dir / "components.csv");
    out << "t,label,value,trend,centered";
    for (int j = 1; j <= J; ++j) out << ",x" << j;
    out << ",residual,weighted_fit\n";
    const auto& w = model.weights().w;
    for (std::size_t t = 0; t < n; ++t) {
      const double c = model.trend().centered[t];
      out << t << ',' << csv_field(x.label(t)) << ',' << x[t] << ',' << x[t] - c << ',' << c;
      const bool ok = t >= dec.first_supported();
      double fit = 0.0;
      for (int j = 1; j <= J; ++j) {
        const auto& comp = dec.components[static_cast<std::size_t>(j - 1)];
        out << ',';
        if (ok && comp.available(t)) {
          out << comp[t];
          fit += w[static_cast<std::size_t>(j - 1)] * comp[t];
        }
      }
      out << ',';
      if (ok && dec.residual.series.available(t)) out << dec.residual.series[t];
      out << ',';
      if (ok) out << fit;
      out << '\n';
    }
    outputs.push_back((dir / "components.csv").string());
  }
  PersistenceRatios ratios;
  try {
    ratios = persistence_ratios(betas, s.k_ref);
  } catch (const std::exception& e) {
    throw RunError("ratios", id, e.what());
  }
  {
    auto out = open_csv(dir / "ratios.csv");
    out << "u,label";
    for (int j = 1; j <= J; ++j) out << ",j" << j;
    out << '\n';
    for (std::size_t g = 0; g < ratios.grid.size(); ++g) {
      out << ratios.grid[g] << ',' << csv_field(grid_label(g));
      for (int j = 0; j < J; ++j) {
        out << ',';
        if (ratios.defined[g]) out << ratios.ratio(static_cast<Eigen::Index>(g), j);
      }
      out << '\n';
    }
    outputs.push_back((dir / "ratios.csv").string());
  }
  if (by_year && obs_grid && x.has_labels()) {
    std::vector<std::string> keys;
    for (std::size_t g = 0; g < n; ++g) keys.push_back(x.label(g).substr(0, 4));
    for (auto& [year, v] : average_ratios(ratios, keys)) (*by_year)[id + "\x1f" + year] = v;
  }
  json eff = model_effective(model);
  eff["k_ref"] = ratios.k_ref;
  eff["undefined_ratio_points"] =
      std::count(ratios.defined.begin(), ratios.defined.end(), false);
  return eff;
}

int run_decompose(const Settings& s) {
  const Panel panel = load_panel(s);
  const fs::path out(s.output);
  fs::create_directories(out);
  std::vector<std::string> outputs;
  json effective;
  std::map<std::string, std::vector<double>> by_year;
  const bool multi = panel.size() > 1;
  for (const auto& [id, series] : panel.members()) {
    effective[id] = decompose_one(id, series, s, multi ? out / id : out, outputs, &by_year);
  }
  if (!by_year.empty()) {
    auto f = open_csv(out / "ratios_by_year.csv");
    f << "asset,year";
    for (int j = 1; j <= s.scales; ++j) f << ",j" << j;
    f << '\n';
    for (const auto& [key, v] : by_year) {
      const auto sep = key.find('\x1f');
      f << csv_field(key.substr(0, sep)) << ',' << key.substr(sep + 1);
      for (double r : v) f << ',' << r;
      f << '\n';
    }
    outputs.push_back((out / "ratios_by_year.csv").string());
  }
  write_manifest(out / "manifest.json", "decompose", s, effective, outputs,
                 (out / "config.ini").string());
  return 0;
}

json fits_json(const LossTable& t) {
  json j = json::array();
  for (const auto& f : t.fits) {
    json e;
    e["asset"] = f.asset;
    e["model"] = f.model;
    e["horizon"] = f.horizon;
    for (const auto& [k, v] : f.parameters) e[k] = v;
    j.push_back(e);
  }
  return j;
}

json failures_json(const LossTable& t) {
  json j = json::array();
  for (const auto& f : t.failures) {
    j.push_back({{"asset", f.asset}, {"model", f.model}, {"horizon", f.horizon}, {"error", f.message}});
  }
  return j;
}

int report_failures(const LossTable& t, const Settings& s) {
  for (const auto& f : t.failures) {
    log(Level::error, "[stage=fit series=" + f.asset + " model=" + f.model +
                          " h=" + std::to_string(f.horizon) + "] " + f.message);
  }
  if (t.failures.empty() || s.allow_failures) return 0;
  return 1;
}

// Out-of-sample TV-EWD forecasts from the split onwards, or a single forecast
// from the end of the sample when no split is given.
int run_forecast(const Settings& s) {
  const Panel panel = load_panel(s);
  const fs::path out(s.output);
  fs::create_directories(out);
  std::vector<std::string> outputs;
  json effective;
  if (s.split == 0) {
    auto f = open_csv(out / "forecasts.csv");
    f << "asset,origin,target,horizon,model,forecast,realized\n";
    for (const auto& [id, x] : panel.members()) {
      for (int h : s.horizons) {
        auto cfg = tvewd_schedule(s).for_horizon(h);
        try {
          const auto m = TvEwdModel::fit(x.values(), cfg);
          const auto b = m.breakdown(h);
          f << csv_field(id) << ',' << csv_field(x.label(x.size() - 1)) << ",," << h << ",tvewd,"
            << b.total << ",\n";
          json e = model_effective(m);
          e["trend_forecast"] = b.trend;
          e["scale_forecasts"] = b.scales;
          effective[id][std::to_string(h)] = e;
        } catch (const StageError& e) {
          throw RunError(e.stage(), id, e.what());
        } catch (const std::exception& e) {
          throw RunError("forecast", id, e.what());
        }
      }
    }
    outputs.push_back((out / "forecasts.csv").string());
    write_manifest(out / "manifest.json", "forecast", s, effective, outputs,
                   (out / "config.ini").string());
    return 0;
  }
  EvalOptions opt;
  opt.in_sample = s.split;
  opt.horizons = s.horizons;
  opt.baseline = "tvewd";
  opt.keep_forecasts = true;
  for (const auto& p : s.periods) opt.periods.push_back(parse_sub_period(p));
  const auto table = evaluate(panel, registry_models(model_specs(s, {"tvewd"})), opt);
  write_forecasts_csv((out / "forecasts.csv").string(), table);
  write_losses_csv((out / "losses.csv").string(), table);
  outputs = {(out / "forecasts.csv").string(), (out / "losses.csv").string()};
  effective["fits"] = fits_json(table);
  effective["failures"] = failures_json(table);
  write_manifest(out / "manifest.json", "forecast", s, effective, outputs,
                 (out / "config.ini").string());
  return report_failures(table, s);
}

int run_benchmark(const Settings& s) {
  const Panel panel = load_panel(s);
  if (s.split == 0) throw ConfigError("benchmark needs --split");
  const fs::path out(s.output);
  fs::create_directories(out);
  EvalOptions opt;
  opt.in_sample = s.split;
  opt.horizons = s.horizons;
  opt.baseline = s.baseline.empty() ? s.models.front() : s.baseline;
  opt.keep_forecasts = s.keep_forecasts;
  for (const auto& p : s.periods) opt.periods.push_back(parse_sub_period(p));
  log(Level::info, "benchmark: " + std::to_string(panel.size()) + " series x " +
                       std::to_string(s.models.size()) + " models x " +
                       std::to_string(s.horizons.size()) + " horizons");
  const auto table = evaluate(panel, registry_models(model_specs(s, s.models)), opt);
  std::vector<std::string> outputs;
  auto emit = [&](const std::string& name, auto writer) {
    writer((out / name).string(), table);
    outputs.push_back((out / name).string());
  };
  emit("losses.csv", write_losses_csv);
  emit("losses_relative.csv", write_relative_csv);
  emit("ratios_by_asset.csv", write_ratio_boxplot_csv);
  emit("summary.md", write_summary_md);
  if (s.keep_forecasts) emit("forecasts.csv", write_forecasts_csv);
  json effective;
  effective["baseline"] = opt.baseline;
  effective["fits"] = fits_json(table);
  effective["failures"] = failures_json(table);
  write_manifest(out / "manifest.json", "benchmark", s, effective, outputs,
                 (out / "config.ini").string());
  return report_failures(table, s);
}

int run_simulate(const Settings& s, const std::string& out_file) {
  if (out_file.empty()) throw ConfigError("simulate needs --out");
  Simulation sim;
  try {
    sim = simulate_named(s.dgp, s.length, s.seed, s.stream);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const fs::path path(out_file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_series_csv(path.string(), sim.series, "x");
  json eff;
  eff["burn_in"] = kBurnIn;
  fs::path manifest = path;
  manifest.replace_extension(".manifest.json");
  fs::path cfg = path;
  cfg.replace_extension(".config.ini");
  write_manifest(manifest, "simulate", s, eff, {path.string()}, cfg.string());
  return 0;
}

void add_model_options(CLI::App& sub, Settings& s) {
  sub.add_option("--scales,-J", s.scales, "number of dyadic scales J")->capture_default_str();
  sub.add_option("--lags,-p", s.lags, "TV-AR lag order p")->capture_default_str();
  sub.add_option("--horizon,--horizons", s.horizons, "forecast horizon(s), comma separated")
      ->delimiter(',')
      ->capture_default_str();
  sub.add_option("--trend-bw", s.trend_bw, "trend kernel width")->capture_default_str();
  sub.add_option("--ma-bw,--bandwidth", s.ma_bw, "TV-AR (moving average) kernel width")
      ->capture_default_str();
  sub.add_option("--kmax", s.kmax, "shifts kept at the coarsest scale (0 = automatic)")
      ->capture_default_str();
  sub.add_option("--n-trunc", s.n_trunc, "MA truncation N (0 = 2^J * 32)")->capture_default_str();
  sub.add_option("--kernel", s.kernel, "epanechnikov, gaussian or uniform")->capture_default_str();
  sub.add_option("--trend-model", s.trend_model, "tvar1-trend, tvar1-raw or level")
      ->capture_default_str();
  sub.add_flag("--bandwidth-cv", s.bandwidth_cv, "choose the TV-AR width by cross-validation");
  sub.add_flag("--trend-bw-cv", s.trend_bw_cv, "choose the trend width by cross-validation");
  sub.add_option("--cv-grid", s.cv_grid, "candidate widths for cross-validation")->delimiter(',');
  sub.add_option("--grid-points", s.grid_points,
                 "estimate on this many points and interpolate (0 = every observation)")
      ->capture_default_str();
  sub.add_flag("--allow-nonstationary-points", s.allow_nonstationary,
               "flag explosive local fits instead of failing");
  sub.add_flag("--include-residual", s.include_residual,
               "add the low-pass residual forecast to the TV-EWD total");
  sub.add_option("--schedule", s.schedule, "per-horizon TV-EWD overrides h:J:p")->delimiter(',');
}

void add_io_options(CLI::App& sub, Settings& s) {
  sub.add_option("--input,-i", s.input, "CSV file (date,value or a wide panel)");
  sub.add_option("--column", s.column, "use only this column of the CSV");
  sub.add_option("--transform", s.transform, "none, log or logdiff")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  std::string sim_out;
  try {
    if (auto p = scan_preset(argc, argv)) {
      s.preset = *p;
      apply_preset(*p, s);
    }
  } catch (const ConfigError& e) {
    std::cerr << "tvewd: config error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Time-varying extended Wold decomposition: multiscale persistence and forecasting"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "INI/TOML config file (flags override it)");
  app.add_option("--preset", s.preset, "inflation-pce or rv-sp500");
  app.add_option("--log-level", s.log_level, "error, warn, info or debug")->capture_default_str();
  app.add_option("--threads", s.threads, "OpenMP threads (0 = runtime default)");
  app.require_subcommand(1);
  app.fallthrough();

  auto* dec = app.add_subcommand("decompose", "trend, scale components, betas and persistence ratios");
  add_io_options(*dec, s);
  add_model_options(*dec, s);
  dec->add_option("--out,-o", s.output, "output directory")->capture_default_str();
  dec->add_option("--k-ref", s.k_ref, "shift used for the persistence ratios")->capture_default_str();

  auto* fc = app.add_subcommand("forecast", "TV-EWD forecasts (out of sample with --split)");
  add_io_options(*fc, s);
  add_model_options(*fc, s);
  fc->add_option("--out,-o", s.output, "output directory")->capture_default_str();
  fc->add_option("--split", s.split, "in-sample length (0 = forecast past the sample end)");
  fc->add_flag("--recursive", s.recursive, "refit at every origin");
  fc->add_option("--period", s.periods, "sub-period name:YYYY-MM:YYYY-MM")->delimiter(';');
  fc->add_flag("--allow-failures", s.allow_failures, "exit 0 even if some series fail");

  auto* bm = app.add_subcommand("benchmark", "out-of-sample comparison of forecasting models");
  add_io_options(*bm, s);
  add_model_options(*bm, s);
  bm->add_option("--out,-o", s.output, "output directory")->capture_default_str();
  bm->add_option("--split", s.split, "in-sample length");
  bm->add_option("--models", s.models, "ar3,har,tvar3,tvhar,ewd,tvewd")->delimiter(',');
  bm->add_option("--baseline", s.baseline, "model the losses are scaled by (default: first)");
  bm->add_option("--period", s.periods, "sub-period name:YYYY-MM:YYYY-MM")->delimiter(';');
  bm->add_option("--tv-bw", s.tv_bw, "kernel width of the TV-AR/TV-HAR benchmarks")->capture_default_str();
  bm->add_flag("--recursive", s.recursive, "refit at every origin");
  bm->add_flag("--keep-forecasts", s.keep_forecasts, "also write forecasts.csv");
  bm->add_flag("--allow-failures", s.allow_failures, "exit 0 even if some series fail");

  auto* sim = app.add_subcommand("simulate", "draw a synthetic series");
  sim->add_option("--dgp", s.dgp, "a, b or c")->capture_default_str();
  sim->add_option("--t,-T", s.length, "sample length")->capture_default_str();
  sim->add_option("--seed", s.seed, "seed")->capture_default_str();
  sim->add_option("--stream", s.stream, "replication id")->capture_default_str();
  sim->add_option("--out,-o", sim_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* active = app.get_subcommands().front();
  const std::string name = active->get_name();
  try {
    g_level = parse_level(s.log_level);
    if (s.threads > 0) omp_set_num_threads(s.threads);
    validate(s, name);
    const fs::path cfg_path = name == "simulate"
                                  ? fs::path(sim_out).replace_extension(".config.ini")
                                  : fs::path(s.output) / "config.ini";
    int code = 0;
    if (name == "decompose") code = run_decompose(s);
    if (name == "forecast") code = run_forecast(s);
    if (name == "benchmark") code = run_benchmark(s);
    if (name == "simulate") code = run_simulate(s, sim_out);
    // Effective settings of this run only; presets are already folded in.
    std::ofstream cfg(cfg_path);
    cfg << "log-level=\"" << s.log_level << "\"\nthreads=" << s.threads << "\n[" << name << "]\n";
    std::istringstream lines(active->config_to_str(true, false));
    for (std::string line; std::getline(lines, line);) {
      if (line.size() < 3 || line.compare(line.size() - 3, 3, "=\"\"") != 0) cfg << line << '\n';
    }
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "tvewd: config error: " << e.what() << '\n';
    return 2;
  } catch (const RunError& e) {
    std::cerr << "tvewd: error " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "tvewd: error [stage=" << name << "] " << e.what() << '\n';
    return 1;
  }
}
