#include "tvewd/forecaster.hpp"

#include <algorithm>
#include <cmath>

#include "tvewd/error.hpp"

namespace tvewd {

TrendModel trend_model_from_name(const std::string& name) {
  if (name == "tvar1-trend") return TrendModel::tvar1_trend;
  if (name == "tvar1-raw") return TrendModel::tvar1_raw;
  if (name == "level") return TrendModel::level;
  throw DomainError("unknown trend model '" + name + "' (tvar1-trend, tvar1-raw, level)");
}

std::string to_string(TrendModel m) {
  switch (m) {
    case TrendModel::tvar1_trend: return "tvar1-trend";
    case TrendModel::tvar1_raw: return "tvar1-raw";
    case TrendModel::level: return "level";
  }
  return "?";
}

void ForecastConfig::validate() const {
  if (scales < 1 || scales > 16) throw DomainError("scales J must lie in [1,16]");
  if (lags < 1) throw DomainError("AR lags p must be >= 1");
  if (horizon < 1) throw DomainError("forecast horizon must be >= 1");
  Bandwidth trend_check(trend_bandwidth);
  Bandwidth ma_check(ma_bandwidth);
  if (truncation != 0 && kmax != 0 && truncation < (kmax << scales)) {
    throw DomainError("truncation N=" + std::to_string(truncation) + " < K_max * 2^J = " +
                      std::to_string(kmax << scales));
  }
  if ((cv_ma_bandwidth || cv_trend_bandwidth) && cv_candidates.empty()) {
    throw DomainError("bandwidth CV requested with an empty candidate grid");
  }
}

std::size_t ForecastConfig::resolved_truncation() const {
  if (truncation != 0) return truncation;
  const std::size_t base = default_truncation(scales);
  return kmax != 0 ? std::max(base, kmax << scales) : base;
}

std::size_t ForecastConfig::resolved_kmax(std::size_t innovations) const {
  if (kmax != 0) return kmax;
  const std::size_t by_truncation = resolved_truncation() >> scales;
  const std::size_t by_sample = innovations / (std::size_t{2} << scales);
  return std::max<std::size_t>(1, std::min(by_truncation, by_sample));
}

ScaleWeights fit_weights(std::span<const double> centered,
                         const std::vector<AlignedSeries>& components, std::size_t end) {
  if (components.empty()) throw DomainError("weights: no scale components");
  const std::size_t first = components.front().first;
  const std::size_t j = components.size();
  for (const auto& c : components) {
    if (c.first != first) throw DomainError("weights: components start at different positions");
  }
  end = std::min(end, components.front().end());
  end = std::min(end, centered.size());
  const std::size_t n = end > first ? end - first : 0;
  if (n < j + 10) {
    throw DomainError("weights need >= J+10 = " + std::to_string(j + 10) +
                      " fully supported observations, got " + std::to_string(n) +
                      " (reduce K_max or J)");
  }
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    y(static_cast<Eigen::Index>(r)) = centered[first + r];
    for (std::size_t c = 0; c < j; ++c) {
      design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = components[c][first + r];
    }
  }
  ScaleWeights out;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  Eigen::VectorXd w;
  if (qr.rank() == static_cast<Eigen::Index>(j)) {
    w = qr.solve(y);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    cod.setThreshold(1e-10);
    w = cod.solve(y);
    out.collinear = true;
  }
  out.w.assign(w.data(), w.data() + w.size());
  const Eigen::VectorXd resid = y - design * w;
  out.residuals.first = first;
  out.residuals.values.assign(resid.data(), resid.data() + resid.size());
  const double sst = y.squaredNorm();
  out.r_squared = sst > 0.0 ? 1.0 - resid.squaredNorm() / sst : 0.0;
  return out;
}

double TrendAr1::iterate(double start, int steps) const {
  if (steps < 0) throw DomainError("trend iteration: negative step count");
  if (explosive) steps = std::min(steps, 1);
  double x = start;
  for (int s = 0; s < steps; ++s) x = intercept + slope * x;
  return x;
}

TrendAr1 fit_trend_ar1(std::span<const double> series, const Kernel& kernel, Bandwidth b) {
  if (series.size() < 6) throw DomainError("trend TV-AR(1) needs at least 6 observations");
  const auto reg = ar_regression(series, 1, true);
  const auto est = reg.fit_at(1.0, kernel, b.value(), SolveMode::least_norm);
  TrendAr1 out;
  out.intercept = est.level(0);
  out.slope = est.level(1);
  out.explosive = std::abs(out.slope) >= 1.0;
  return out;
}

double forecast_trend(std::span<const double> series, int h, const Kernel& kernel, Bandwidth b) {
  if (h < 1) throw DomainError("forecast horizon must be >= 1");
  return fit_trend_ar1(series, kernel, b).iterate(series.back(), h);
}

namespace {

// Shared by the detail and low-pass forecasts: sum_k c_k E_T[shock_{T+h-k 2^j}],
// where the shock is a signed window sum of innovations scaled by 2^{-j/2}.
double dyadic_forecast(std::span<const double> coef, const AlignedSeries& innovations, int j,
                       int h, std::size_t origin, bool lowpass) {
  if (j < 1 || j > 30) throw DomainError("scale index j out of range");
  if (h < 0) throw DomainError("forecast horizon must be >= 0");
  if (!innovations.available(origin)) {
    throw DomainError("innovation at the forecast origin " + std::to_string(origin) +
                      " is unavailable");
  }
  const std::size_t width = std::size_t{1} << j;
  const std::size_t half = width / 2;
  const double norm = 1.0 / std::sqrt(static_cast<double>(width));
  const std::size_t target = origin + static_cast<std::size_t>(h);
  double total = 0.0;
  for (std::size_t k = 0; k < coef.size(); ++k) {
    if (k * width > target) break;
    const std::size_t s = target - k * width;  // date of the shock
    if (s >= origin + width) continue;         // wholly in the future: zero mean
    double acc = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      if (i > s) break;
      const std::size_t tau = s - i;
      if (tau > origin) continue;
      if (!innovations.available(tau)) {
        throw DomainError("scale forecast needs innovation at position " + std::to_string(tau) +
                          ", which precedes the available sample");
      }
      acc += (lowpass || i < half ? 1.0 : -1.0) * innovations[tau];
    }
    total += coef[k] * norm * acc;
  }
  return total;
}

}  // namespace

double forecast_scale(std::span<const double> boundary_beta, const AlignedSeries& innovations,
                      int j, int h, std::size_t origin) {
  return dyadic_forecast(boundary_beta, innovations, j, h, origin, false);
}

double forecast_residual(std::span<const double> boundary_gamma, const AlignedSeries& innovations,
                         int scales, int h, std::size_t origin) {
  return dyadic_forecast(boundary_gamma, innovations, scales, h, origin, true);
}

TvEwdModel TvEwdModel::fit(std::span<const double> series, const ForecastConfig& config) {
  config.validate();
  const GridOptions grid{make_grid(series.size(), config.grid_points), config.parallel};
  std::optional<CvResult> trend_cv, ma_cv;
  TrendFit trend;
  try {
    double tb = config.trend_bandwidth;
    if (config.cv_trend_bandwidth) {
      trend_cv = cross_validate_trend_bandwidth(series, config.kernel, config.cv_candidates,
                                                config.parallel);
      tb = trend_cv->selected.value();
    }
    trend = estimate_trend(series, config.kernel, Bandwidth(tb), grid);
  } catch (const std::exception& e) {
    throw StageError("trend", e.what());
  }
  TvArFit tvar;
  try {
    double ab = config.ma_bandwidth;
    if (config.cv_ma_bandwidth) {
      ma_cv = cross_validate_bandwidth(trend.centered, config.lags, config.kernel,
                                       config.cv_candidates, config.parallel);
      ab = ma_cv->selected.value();
    }
    tvar = estimate_tvar(trend.centered, config.lags, config.kernel, Bandwidth(ab), grid);
    tvar.phi0 = trend.level;
    tvar.trend_bandwidth = trend.bandwidth;
  } catch (const std::exception& e) {
    throw StageError("tvar", e.what());
  }
  TvEwdModel model = assemble(series, std::move(trend), std::move(tvar), config);
  model.trend_cv_ = std::move(trend_cv);
  model.ma_cv_ = std::move(ma_cv);
  return model;
}

TvEwdModel TvEwdModel::assemble(std::span<const double> series, TrendFit trend, TvArFit tvar,
                                const ForecastConfig& config) {
  config.validate();
  if (trend.centered.size() != series.size() || tvar.sample_length != series.size()) {
    throw DomainError("assemble: stage fits do not match the series length");
  }
  TvEwdModel m;
  m.config_ = config;
  m.in_sample_.assign(series.begin(), series.end());
  m.trend_ = std::move(trend);
  m.tvar_ = std::move(tvar);
  m.finish();
  return m;
}

void TvEwdModel::finish() {
  const std::size_t n = in_sample_.size();
  const int J = config_.scales;
  try {
    MaOptions mo;
    mo.truncation = config_.resolved_truncation();
    mo.tail_tol = config_.tail_tol;
    mo.allow_nonstationary = config_.allow_nonstationary;
    mo.parallel = config_.parallel;
    const std::size_t kmax = config_.resolved_kmax(tvar_.innovations.size());
    mo.truncation = std::max(mo.truncation, kmax << J);
    ma_ = ar_to_ma(tvar_, mo);
    dec_ = decompose(ma_, tvar_.innovations, n, J, kmax, config_.parallel);
  } catch (const std::exception& e) {
    throw StageError("decomposition", e.what());
  }
  try {
    weights_ = fit_weights(trend_.centered, dec_.components, n);
  } catch (const std::exception& e) {
    throw StageError("weights", e.what());
  }
  try {
    if (config_.trend_model == TrendModel::tvar1_trend) {
      std::vector<double> level(n);
      for (std::size_t t = 0; t < n; ++t) level[t] = in_sample_[t] - trend_.centered[t];
      trend_ar1_ = fit_trend_ar1(level, config_.kernel, Bandwidth(trend_.bandwidth > 0 ? trend_.bandwidth : config_.trend_bandwidth));
    } else if (config_.trend_model == TrendModel::tvar1_raw) {
      trend_ar1_ = fit_trend_ar1(in_sample_, config_.kernel,
                                 Bandwidth(trend_.bandwidth > 0 ? trend_.bandwidth : config_.trend_bandwidth));
    }
  } catch (const std::exception& e) {
    throw StageError("trend-forecast", e.what());
  }
  const auto last = static_cast<Eigen::Index>(dec_.betas.grid.size()) - 1;
  boundary_betas_.resize(static_cast<std::size_t>(J));
  for (int j = 1; j <= J; ++j) {
    const auto& beta = dec_.betas.beta[static_cast<std::size_t>(j - 1)];
    boundary_betas_[static_cast<std::size_t>(j - 1)].assign(beta.row(last).data(),
                                                            beta.row(last).data() + beta.cols());
  }
  const auto& gamma = dec_.residual.gamma;
  boundary_gamma_.assign(gamma.row(gamma.rows() - 1).data(),
                         gamma.row(gamma.rows() - 1).data() + gamma.cols());
}

std::span<const double> TvEwdModel::boundary_beta(int j) const {
  return boundary_betas_.at(static_cast<std::size_t>(j - 1));
}

// Trend level used to center position `pos`: the in-sample estimate, then the
// frozen extrapolation beyond it.
double TvEwdModel::trend_at(std::size_t pos, std::span<const double> history) const {
  const std::size_t m = in_sample_.size();
  if (pos < m) return history[pos] - trend_.centered[pos];
  const double last_level = trend_.level.back();
  if (config_.trend_model == TrendModel::tvar1_trend) {
    const double start = in_sample_[m - 1] - trend_.centered[m - 1];
    return trend_ar1_->iterate(start, static_cast<int>(pos - m + 1));
  }
  return last_level;
}

ForecastBreakdown TvEwdModel::breakdown(int h) const { return breakdown_from(in_sample_, h); }

ForecastBreakdown TvEwdModel::breakdown_from(std::span<const double> history, int h) const {
  if (h < 1) throw DomainError("forecast horizon must be >= 1");
  const std::size_t m = in_sample_.size();
  if (history.size() < m) throw DomainError("history shorter than the in-sample fit");
  const std::size_t origin = history.size() - 1;

  const AlignedSeries* innov = &tvar_.innovations;
  AlignedSeries extended;
  if (history.size() > m) {
    const std::size_t p = static_cast<std::size_t>(tvar_.lag_order);
    const Eigen::VectorXd phi = tvar_.boundary_coefficients();
    std::vector<double> centered(history.size());
    for (std::size_t t = 0; t < m; ++t) centered[t] = trend_.centered[t];
    for (std::size_t t = m; t < history.size(); ++t) centered[t] = history[t] - trend_at(t, history);
    extended = tvar_.innovations;
    for (std::size_t t = m; t < history.size(); ++t) {
      double e = centered[t];
      for (std::size_t i = 1; i <= p; ++i) e -= phi(static_cast<Eigen::Index>(i - 1)) * centered[t - i];
      extended.values.push_back(e);
    }
    innov = &extended;
  }

  ForecastBreakdown out;
  switch (config_.trend_model) {
    case TrendModel::tvar1_trend:
      out.trend = trend_at(origin + static_cast<std::size_t>(h), history);
      break;
    case TrendModel::tvar1_raw:
      out.trend = trend_ar1_->iterate(history[origin], h);
      break;
    case TrendModel::level:
      out.trend = trend_.level.back();
      break;
  }
  out.total = out.trend;
  out.scales.resize(boundary_betas_.size());
  for (std::size_t j = 0; j < boundary_betas_.size(); ++j) {
    out.scales[j] = forecast_scale(boundary_betas_[j], *innov, static_cast<int>(j + 1), h, origin);
    out.total += weights_.w[j] * out.scales[j];
  }
  if (config_.include_residual) {
    out.residual = forecast_residual(boundary_gamma_, *innov, config_.scales, h, origin);
    out.total += out.residual;
  }
  return out;
}

double forecast(const ForecastConfig& config, std::span<const double> series) {
  return TvEwdModel::fit(series, config).forecast(config.horizon);
}

}  // namespace tvewd
