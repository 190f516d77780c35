#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvewd/ewd.hpp"
#include "tvewd/kernel.hpp"
#include "tvewd/local_linear.hpp"
#include "tvewd/wold.hpp"

namespace tvewd {

/// How the trend forecast E_T[x^{0}_{T+h}] is produced.
enum class TrendModel {
  tvar1_trend,  // boundary TV-AR(1) fitted to the estimated trend curve phi0(t/T)
  tvar1_raw,    // boundary TV-AR(1) fitted to the raw series, iterated from x_T
  level,        // flat extrapolation of phi0(1)
};

TrendModel trend_model_from_name(const std::string& name);
std::string to_string(TrendModel m);

struct ForecastConfig {
  int scales = 5;
  int lags = 2;
  int horizon = 1;
  double trend_bandwidth = 0.6;
  double ma_bandwidth = 0.2;
  Kernel kernel{};
  std::size_t kmax = 0;        // 0: automatic, see resolved_kmax
  std::size_t truncation = 0;  // 0: 2^J * 32
  TrendModel trend_model = TrendModel::tvar1_trend;
  bool cv_ma_bandwidth = false;
  bool cv_trend_bandwidth = false;
  std::vector<double> cv_candidates = default_bandwidth_candidates();
  std::size_t grid_points = 0;  // 0: every observation time
  bool allow_nonstationary = false;
  bool include_residual = false;  // add E_T[pi^{J}_{T+h}] (unweighted) to the total
  double tail_tol = 1e-6;
  bool parallel = true;

  void validate() const;
  std::size_t resolved_truncation() const;
  /// Explicit kmax if set; otherwise floor(N / 2^J), reduced so the burn-in
  /// kmax * 2^J uses at most half of the available innovations.
  std::size_t resolved_kmax(std::size_t innovations) const;
};

struct ScaleWeights {
  std::vector<double> w;
  double r_squared = 0.0;
  AlignedSeries residuals;  // eta_t
  bool collinear = false;
};

/// OLS without intercept of the centered series on the J scale components
/// over positions [components.first, end).
ScaleWeights fit_weights(std::span<const double> centered,
                         const std::vector<AlignedSeries>& components, std::size_t end);

/// Boundary TV-AR(1) with intercept: x_t = c(1) + a(1) x_{t-1}.
struct TrendAr1 {
  double intercept = 0.0;
  double slope = 0.0;
  bool explosive = false;  // |a(1)| >= 1; iteration is clamped to one step

  double iterate(double start, int steps) const;
};

TrendAr1 fit_trend_ar1(std::span<const double> series, const Kernel& kernel, Bandwidth b);

/// h-step forecast of a series by its boundary TV-AR(1), iterated from the last value.
double forecast_trend(std::span<const double> series, int h, const Kernel& kernel, Bandwidth b);

/// E_T[x^{j}_{T+h}] = sum_k beta^{j}(1,k) E_T[e^{j}_{T+h-k 2^j}], where innovations
/// dated after `origin` enter as zero. `boundary_beta` holds beta^{j}(1, k) for
/// k = 0..K_j-1. h = 0 reproduces the in-sample component at `origin`.
double forecast_scale(std::span<const double> boundary_beta, const AlignedSeries& innovations,
                      int j, int h, std::size_t origin);

/// E_T[pi^{J}_{T+h}] from the boundary residual coefficients gamma^{J}(1, k),
/// driven by the all-positive Haar aggregate of the innovations.
double forecast_residual(std::span<const double> boundary_gamma, const AlignedSeries& innovations,
                         int scales, int h, std::size_t origin);

struct ForecastBreakdown {
  double trend = 0.0;
  std::vector<double> scales;  // unweighted E_T[x^{j}_{T+h}]
  double residual = 0.0;       // only filled with include_residual
  double total = 0.0;
};

/// Fitted TV-EWD forecaster. Parameters are frozen at the in-sample fit;
/// later origins reuse them (fixed-parameter rolling forecasts).
class TvEwdModel {
 public:
  static TvEwdModel fit(std::span<const double> series, const ForecastConfig& config);
  /// Build from externally estimated stages (e.g. constant coefficient curves).
  static TvEwdModel assemble(std::span<const double> series, TrendFit trend, TvArFit tvar,
                             const ForecastConfig& config);

  ForecastBreakdown breakdown(int h) const;
  double forecast(int h) const { return breakdown(h).total; }

  /// Forecast from the end of `history`, which must start with the in-sample
  /// data and may extend it with later realized values.
  ForecastBreakdown breakdown_from(std::span<const double> history, int h) const;
  double forecast_from(std::span<const double> history, int h) const {
    return breakdown_from(history, h).total;
  }

  const ForecastConfig& config() const noexcept { return config_; }
  const TrendFit& trend() const noexcept { return trend_; }
  const TvArFit& tvar() const noexcept { return tvar_; }
  const MaRepresentation& ma() const noexcept { return ma_; }
  const ScaleDecomposition& decomposition() const noexcept { return dec_; }
  const ScaleWeights& weights() const noexcept { return weights_; }
  const std::optional<TrendAr1>& trend_ar1() const noexcept { return trend_ar1_; }
  std::size_t in_sample_length() const noexcept { return in_sample_.size(); }
  std::span<const double> boundary_beta(int j) const;
  std::span<const double> boundary_gamma() const noexcept { return boundary_gamma_; }
  const std::optional<CvResult>& ma_cv() const noexcept { return ma_cv_; }
  const std::optional<CvResult>& trend_cv() const noexcept { return trend_cv_; }

 private:
  TvEwdModel() = default;
  void finish();
  double trend_at(std::size_t pos, std::span<const double> history) const;

  ForecastConfig config_;
  std::vector<double> in_sample_;
  TrendFit trend_;
  TvArFit tvar_;
  MaRepresentation ma_;
  ScaleDecomposition dec_;
  ScaleWeights weights_;
  std::optional<TrendAr1> trend_ar1_;
  std::vector<std::vector<double>> boundary_betas_;
  std::vector<double> boundary_gamma_;
  std::optional<CvResult> ma_cv_, trend_cv_;
};

/// One-shot: fit on `series` and forecast h steps past its end.
double forecast(const ForecastConfig& config, std::span<const double> series);

}  // namespace tvewd
