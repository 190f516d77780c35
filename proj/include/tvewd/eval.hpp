#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvewd/benchmarks.hpp"
#include "tvewd/series.hpp"

namespace tvewd {

double rmse(std::span<const double> errors);
double mae(std::span<const double> errors);

enum class Metric { rmse, mae };

/// Calendar window [from, to] with month bounds "YYYY-MM"; an observation
/// belongs to it when its target label's month lies inside.
struct SubPeriod {
  std::string name;
  std::string from;
  std::string to;
  bool contains(const std::string& label) const;
};

/// Parses "name:YYYY-MM:YYYY-MM".
SubPeriod parse_sub_period(const std::string& text);

struct ModelEntry {
  std::string name;
  std::function<std::unique_ptr<ForecastModel>(int horizon)> make;
};

struct ForecastRecord {
  std::string asset, model;
  int horizon = 0;
  std::size_t origin = 0;
  std::string origin_label, target_label;
  double forecast = 0.0, realized = 0.0;
};

struct LossEntry {
  std::string asset, model, period;
  int horizon = 0;
  double rmse = 0.0, mae = 0.0;
  std::size_t count = 0;
  std::vector<double> errors;  // forecast - realized, by origin
};

struct AssetFailure {
  std::string asset, model;
  int horizon = 0;
  std::string message;
};

struct FitRecord {
  std::string asset, model;
  int horizon = 0;
  std::vector<std::pair<std::string, double>> parameters;
};

struct EvalOptions {
  std::size_t in_sample = 0;
  std::vector<int> horizons{1};
  std::string baseline;
  std::vector<SubPeriod> periods;  // "full" is always evaluated
  bool parallel = true;
  bool keep_forecasts = false;
};

class LossTable {
 public:
  std::string baseline;
  std::vector<LossEntry> entries;
  std::vector<AssetFailure> failures;
  std::vector<ForecastRecord> forecasts;
  std::vector<FitRecord> fits;

  const LossEntry* find(const std::string& asset, const std::string& model, int horizon,
                        const std::string& period = "full") const;
  /// loss(model) / loss(baseline) for one asset; nullopt if either is missing
  /// or the baseline loss is zero.
  std::optional<double> relative(const std::string& asset, const std::string& model, int horizon,
                                 const std::string& period, Metric metric) const;
  /// Cross-sectional median of the relative losses.
  std::optional<double> median_relative(const std::string& model, int horizon,
                                        const std::string& period, Metric metric) const;

  std::vector<std::string> assets() const;
  std::vector<std::string> models() const;
  std::vector<int> horizons() const;
  std::vector<std::string> periods() const;
};

/// Fixed-parameter out-of-sample evaluation: every model is fitted once per
/// (asset, horizon) on the first `in_sample` observations, then forecasts from
/// each origin m-1, m, ... whose target lies inside the sample.
LossTable evaluate(const Panel& panel, const std::vector<ModelEntry>& models,
                   const EvalOptions& options);

/// Model entries backed by the registry in benchmarks.hpp.
std::vector<ModelEntry> registry_models(const std::vector<ModelSpec>& specs);

/// RMSE and MAE over the union of several cells (pooled errors).
std::pair<double, double> pooled_losses(std::span<const LossEntry* const> cells);

void write_losses_csv(const std::string& path, const LossTable& table);
void write_relative_csv(const std::string& path, const LossTable& table);
void write_ratio_boxplot_csv(const std::string& path, const LossTable& table);
void write_forecasts_csv(const std::string& path, const LossTable& table);
void write_summary_md(const std::string& path, const LossTable& table);

double median(std::vector<double> values);

}  // namespace tvewd
