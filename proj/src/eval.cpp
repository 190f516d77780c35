#include "tvewd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "tvewd/error.hpp"

namespace tvewd {

double rmse(std::span<const double> errors) {
  if (errors.empty()) throw DomainError("rmse of an empty error sequence");
  double s = 0.0;
  for (double e : errors) s += e * e;
  return std::sqrt(s / static_cast<double>(errors.size()));
}

double mae(std::span<const double> errors) {
  if (errors.empty()) throw DomainError("mae of an empty error sequence");
  double s = 0.0;
  for (double e : errors) s += std::abs(e);
  return s / static_cast<double>(errors.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool SubPeriod::contains(const std::string& label) const {
  if (label.size() < 7) return false;
  const std::string month = label.substr(0, 7);
  return month >= from && month <= to;
}

SubPeriod parse_sub_period(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string p;
  while (std::getline(in, p, ':')) parts.push_back(p);
  if (parts.size() != 3 || parts[1].size() != 7 || parts[2].size() != 7 || parts[1] > parts[2]) {
    throw DomainError("sub-period must look like name:YYYY-MM:YYYY-MM, got '" + text + "'");
  }
  return {parts[0], parts[1], parts[2]};
}

const LossEntry* LossTable::find(const std::string& asset, const std::string& model, int horizon,
                                 const std::string& period) const {
  for (const auto& e : entries) {
    if (e.asset == asset && e.model == model && e.horizon == horizon && e.period == period) return &e;
  }
  return nullptr;
}

std::optional<double> LossTable::relative(const std::string& asset, const std::string& model,
                                          int horizon, const std::string& period,
                                          Metric metric) const {
  const auto* m = find(asset, model, horizon, period);
  const auto* b = find(asset, baseline, horizon, period);
  if (!m || !b) return std::nullopt;
  const double den = metric == Metric::rmse ? b->rmse : b->mae;
  const double num = metric == Metric::rmse ? m->rmse : m->mae;
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

std::optional<double> LossTable::median_relative(const std::string& model, int horizon,
                                                 const std::string& period, Metric metric) const {
  std::vector<double> r;
  for (const auto& a : assets()) {
    if (auto v = relative(a, model, horizon, period, metric)) r.push_back(*v);
  }
  if (r.empty()) return std::nullopt;
  return median(std::move(r));
}

namespace {

template <class F>
auto ordered_unique(const std::vector<LossEntry>& entries, F key) {
  using T = std::decay_t<decltype(key(entries.front()))>;
  std::vector<T> out;
  for (const auto& e : entries) {
    const T k = key(e);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

}  // namespace

std::vector<std::string> LossTable::assets() const {
  auto v = ordered_unique(entries, [](const LossEntry& e) { return e.asset; });
  std::sort(v.begin(), v.end());
  return v;
}
std::vector<std::string> LossTable::models() const {
  return ordered_unique(entries, [](const LossEntry& e) { return e.model; });
}
std::vector<int> LossTable::horizons() const {
  auto v = ordered_unique(entries, [](const LossEntry& e) { return e.horizon; });
  std::sort(v.begin(), v.end());
  return v;
}
std::vector<std::string> LossTable::periods() const {
  return ordered_unique(entries, [](const LossEntry& e) { return e.period; });
}

std::pair<double, double> pooled_losses(std::span<const LossEntry* const> cells) {
  std::vector<double> all;
  for (const auto* c : cells) all.insert(all.end(), c->errors.begin(), c->errors.end());
  return {rmse(all), mae(all)};
}

namespace {

struct TaskResult {
  std::vector<LossEntry> entries;
  std::vector<ForecastRecord> forecasts;
  std::optional<AssetFailure> failure;
  std::optional<FitRecord> fit;
};

LossEntry make_entry(const std::string& asset, const std::string& model, int h,
                     const std::string& period, std::vector<double> errors) {
  LossEntry e;
  e.asset = asset;
  e.model = model;
  e.horizon = h;
  e.period = period;
  e.count = errors.size();
  e.rmse = rmse(errors);
  e.mae = mae(errors);
  e.errors = std::move(errors);
  return e;
}

TaskResult run_task(const std::string& asset, const TimeSeries& series, const ModelEntry& model,
                    int h, const EvalOptions& options) {
  TaskResult res;
  try {
    const std::size_t n = series.size();
    const std::size_t m = options.in_sample;
    if (m < 2 || m >= n) {
      throw DomainError("in-sample length " + std::to_string(m) + " invalid for T=" + std::to_string(n));
    }
    if (m - 1 + static_cast<std::size_t>(h) > n - 1) {
      throw DomainError("no out-of-sample target for horizon " + std::to_string(h));
    }
    const auto values = series.values();
    auto fitted = model.make(h);
    fitted->fit(values.subspan(0, m));
    res.fit = FitRecord{asset, model.name, h, fitted->parameters()};
    std::vector<double> errors;
    std::vector<std::string> targets;
    for (std::size_t o = m - 1; o + static_cast<std::size_t>(h) < n; ++o) {
      const double f = fitted->predict(values.subspan(0, o + 1), h);
      const std::size_t target = o + static_cast<std::size_t>(h);
      if (!std::isfinite(f)) throw EstimationError("non-finite forecast at origin " + series.label(o));
      errors.push_back(f - values[target]);
      targets.push_back(series.label(target));
      if (options.keep_forecasts) {
        res.forecasts.push_back({asset, model.name, h, o, series.label(o), series.label(target), f,
                                 values[target]});
      }
    }
    res.entries.push_back(make_entry(asset, model.name, h, "full", errors));
    for (const auto& p : options.periods) {
      std::vector<double> sub;
      for (std::size_t i = 0; i < errors.size(); ++i)
        if (p.contains(targets[i])) sub.push_back(errors[i]);
      if (!sub.empty()) res.entries.push_back(make_entry(asset, model.name, h, p.name, std::move(sub)));
    }
  } catch (const std::exception& e) {
    res.entries.clear();
    res.forecasts.clear();
    res.fit.reset();
    res.failure = AssetFailure{asset, model.name, h, e.what()};
  }
  return res;
}

}  // namespace

LossTable evaluate(const Panel& panel, const std::vector<ModelEntry>& models,
                   const EvalOptions& options) {
  if (models.empty()) throw DomainError("evaluate: no models");
  if (options.horizons.empty()) throw DomainError("evaluate: no horizons");
  for (int h : options.horizons)
    if (h < 1) throw DomainError("evaluate: horizons must be >= 1");
  struct Task {
    const std::string* asset;
    const TimeSeries* series;
    const ModelEntry* model;
    int h;
  };
  std::vector<Task> tasks;
  for (const auto& [id, s] : panel.members())
    for (const auto& m : models)
      for (int h : options.horizons) tasks.push_back({&id, &s, &m, h});

  std::vector<TaskResult> results(tasks.size());
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto& t = tasks[static_cast<std::size_t>(i)];
    results[static_cast<std::size_t>(i)] = run_task(*t.asset, *t.series, *t.model, t.h, options);
  }

  LossTable table;
  table.baseline = options.baseline.empty() ? models.front().name : options.baseline;
  for (auto& r : results) {
    for (auto& e : r.entries) table.entries.push_back(std::move(e));
    for (auto& f : r.forecasts) table.forecasts.push_back(std::move(f));
    if (r.failure) table.failures.push_back(*r.failure);
    if (r.fit) table.fits.push_back(std::move(*r.fit));
  }
  return table;
}

std::vector<ModelEntry> registry_models(const std::vector<ModelSpec>& specs) {
  std::vector<ModelEntry> out;
  for (const auto& s : specs) {
    out.push_back({s.name, [s](int h) { return make_model(s, h); }});
  }
  return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << std::setprecision(12);
  return out;
}

std::string fmt(std::optional<double> v, int digits = 3) {
  if (!v) return "NA";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << *v;
  return os.str();
}

}  // namespace

void write_losses_csv(const std::string& path, const LossTable& table) {
  auto out = open_out(path);
  out << "asset,model,horizon,period,rmse,mae,n\n";
  for (const auto& e : table.entries) {
    out << e.asset << ',' << e.model << ',' << e.horizon << ',' << e.period << ',' << e.rmse << ','
        << e.mae << ',' << e.count << '\n';
  }
}

void write_relative_csv(const std::string& path, const LossTable& table) {
  auto out = open_out(path);
  out << "asset,model,horizon,period,baseline,rel_rmse,rel_mae\n";
  for (const auto& e : table.entries) {
    const auto r = table.relative(e.asset, e.model, e.horizon, e.period, Metric::rmse);
    const auto a = table.relative(e.asset, e.model, e.horizon, e.period, Metric::mae);
    out << e.asset << ',' << e.model << ',' << e.horizon << ',' << e.period << ',' << table.baseline
        << ',' << (r ? std::to_string(*r) : "NA") << ',' << (a ? std::to_string(*a) : "NA") << '\n';
  }
}

void write_ratio_boxplot_csv(const std::string& path, const LossTable& table) {
  auto out = open_out(path);
  out << "metric,period,horizon,model,asset,ratio\n";
  for (Metric metric : {Metric::rmse, Metric::mae}) {
    for (const auto& e : table.entries) {
      if (e.model == table.baseline) continue;
      if (auto r = table.relative(e.asset, e.model, e.horizon, e.period, metric)) {
        out << (metric == Metric::rmse ? "rmse" : "mae") << ',' << e.period << ',' << e.horizon
            << ',' << e.model << ',' << e.asset << ',' << *r << '\n';
      }
    }
  }
}

void write_forecasts_csv(const std::string& path, const LossTable& table) {
  auto out = open_out(path);
  out << "asset,origin,target,horizon,model,forecast,realized\n";
  for (const auto& f : table.forecasts) {
    out << f.asset << ',' << f.origin_label << ',' << f.target_label << ',' << f.horizon << ','
        << f.model << ',' << f.forecast << ',' << f.realized << '\n';
  }
}

void write_summary_md(const std::string& path, const LossTable& table) {
  auto out = open_out(path);
  const auto assets = table.assets();
  const auto horizons = table.horizons();
  out << "# Out-of-sample forecast evaluation\n\n";
  out << "Losses relative to `" << table.baseline << "`";
  if (assets.size() > 1) out << "; median over " << assets.size() << " assets";
  out << ".\n";
  for (const auto& period : table.periods()) {
    out << "\n## Period: " << period << "\n\n| model |";
    for (int h : horizons) out << " h=" << h << " RMSE | h=" << h << " MAE |";
    out << "\n|---|";
    for (std::size_t i = 0; i < horizons.size(); ++i) out << "---|---|";
    out << '\n';
    for (const auto& model : table.models()) {
      if (model == table.baseline) continue;
      out << "| " << model << " |";
      for (int h : horizons) {
        out << ' ' << fmt(table.median_relative(model, h, period, Metric::rmse)) << " | "
            << fmt(table.median_relative(model, h, period, Metric::mae)) << " |";
      }
      out << '\n';
    }
  }
  if (!table.failures.empty()) {
    out << "\n## Excluded (asset, model, horizon)\n\n";
    for (const auto& f : table.failures) {
      out << "- " << f.asset << ", " << f.model << ", h=" << f.horizon << ": " << f.message << '\n';
    }
  }
}

}  // namespace tvewd
