#include "tvewd/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

#include "tvewd/error.hpp"
#include "tvewd/local_linear.hpp"
#include "tvewd/wold.hpp"

namespace tvewd {
namespace {

// OLS with intercept: slopes from the demeaned design, intercept from means.
// A design whose regressors are all constant yields an intercept-only fit.
std::pair<double, Eigen::VectorXd> ols_with_intercept(const Eigen::MatrixXd& x,
                                                      const Eigen::VectorXd& y,
                                                      const char* what) {
  const Eigen::RowVectorXd xm = x.colwise().mean();
  const double ym = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - xm;
  const Eigen::VectorXd yc = y.array() - ym;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(x.cols());
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if (xc.cwiseAbs().maxCoeff() > 1e-12 * scale) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols()) throw EstimationError(std::string(what) + ": singular design");
    b = qr.solve(yc);
  }
  return {ym - xm.dot(b), b};
}

double mean_of(std::span<const double> v, std::size_t end, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = end - count; i < end; ++i) s += v[i];
  return s / static_cast<double>(count);
}

}  // namespace

double ArCoefficients::fitted(std::span<const double> x, std::size_t t) const {
  double v = intercept;
  for (std::size_t i = 1; i <= phi.size(); ++i) v += phi[i - 1] * x[t - i];
  return v;
}

double ArCoefficients::forecast(std::span<const double> history, int h) const {
  const std::size_t p = phi.size();
  if (history.size() < p) throw DomainError("AR forecast: history shorter than p");
  std::vector<double> buf(history.end() - static_cast<std::ptrdiff_t>(p), history.end());
  double x = history.back();
  for (int s = 0; s < h; ++s) {
    x = intercept;
    for (std::size_t i = 1; i <= p; ++i) x += phi[i - 1] * buf[buf.size() - i];
    buf.push_back(x);
  }
  return x;
}

ArCoefficients fit_ar(std::span<const double> series, int p) {
  if (p < 1) throw DomainError("AR order must be >= 1");
  const std::size_t lags = static_cast<std::size_t>(p);
  if (series.size() <= 5 * lags) {
    throw DomainError("AR(" + std::to_string(p) + ") needs T > " + std::to_string(5 * p));
  }
  const std::size_t rows = series.size() - lags;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), p);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + lags;
    y(static_cast<Eigen::Index>(r)) = series[t];
    for (std::size_t i = 1; i <= lags; ++i) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i - 1)) = series[t - i];
  }
  auto [c, b] = ols_with_intercept(x, y, "AR fit");
  return {c, std::vector<double>(b.data(), b.data() + b.size())};
}

double HarCoefficients::fitted(std::span<const double> x, std::size_t t) const {
  return intercept + daily * x[t - 1] + weekly * mean_of(x, t, 5) + monthly * mean_of(x, t, 22);
}

double HarCoefficients::forecast(std::span<const double> history, int h) const {
  if (history.size() < 22) throw DomainError("HAR forecast needs 22 observations of history");
  std::vector<double> buf(history.end() - 22, history.end());
  double x = history.back();
  for (int s = 0; s < h; ++s) {
    x = fitted(buf, buf.size());
    buf.push_back(x);
  }
  return x;
}

HarCoefficients fit_har(std::span<const double> series) {
  if (series.size() <= 50) throw DomainError("HAR needs T > 50");
  const std::size_t rows = series.size() - 22;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + 22;
    const auto i = static_cast<Eigen::Index>(r);
    y(i) = series[t];
    x(i, 0) = series[t - 1];
    x(i, 1) = mean_of(series, t, 5);
    x(i, 2) = mean_of(series, t, 22);
  }
  auto [c, b] = ols_with_intercept(x, y, "HAR fit");
  return {c, b(0), b(1), b(2)};
}

TvBenchmarkFit fit_tv(std::span<const double> series, TvKind kind, int p, double bandwidth,
                      const Kernel& kernel, std::vector<double> grid) {
  Bandwidth b(bandwidth);
  TvBenchmarkFit out;
  out.kind = kind;
  out.lags = p;
  out.grid = std::move(grid);
  const std::size_t n = series.size();
  std::optional<LocalLinearRegression> reg;
  if (kind == TvKind::ar_p) {
    if (p < 1 || n <= 5 * static_cast<std::size_t>(p)) {
      throw DomainError("TV-AR(" + std::to_string(p) + ") needs p >= 1 and T > 5p");
    }
    reg.emplace(ar_regression(series, p, true));
  } else {
    if (n <= 50) throw DomainError("TV-HAR needs T > 50");
    const std::size_t rows = n - 22;
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), 4);
    std::vector<double> y(rows), times(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t t = r + 22;
      const auto i = static_cast<Eigen::Index>(r);
      y[r] = series[t];
      times[r] = rescaled_time(t, n);
      x(i, 0) = 1.0;
      x(i, 1) = series[t - 1];
      x(i, 2) = mean_of(series, t, 5);
      x(i, 3) = mean_of(series, t, 22);
    }
    reg.emplace(std::move(y), std::move(x), std::move(times));
  }
  const auto est = fit_on_grid(*reg, out.grid, kernel, b.value(), SolveMode::strict, false);
  out.curves.resize(static_cast<Eigen::Index>(out.grid.size()), static_cast<Eigen::Index>(reg->cols()));
  for (std::size_t i = 0; i < est.size(); ++i) out.curves.row(static_cast<Eigen::Index>(i)) = est[i].level.transpose();
  return out;
}

// ---------------------------------------------------------------------------

StationaryEwd::StationaryEwd(int scales, int lags, std::size_t kmax, std::size_t truncation)
    : scales_(scales), lags_(lags), kmax_(kmax), truncation_(truncation) {
  if (scales < 1 || scales > 16) throw DomainError("EWD scales must lie in [1,16]");
  if (lags < 1) throw DomainError("EWD lags must be >= 1");
}

std::vector<double> StationaryEwd::innovations(std::span<const double> history) const {
  const std::size_t p = phi_.size();
  std::vector<double> e(history.size(), 0.0);
  for (std::size_t t = p; t < history.size(); ++t) {
    double v = history[t] - mean_;
    for (std::size_t i = 1; i <= p; ++i) v -= phi_[i - 1] * (history[t - i] - mean_);
    e[t] = v;
  }
  return e;
}

void StationaryEwd::fit(std::span<const double> series) {
  const std::size_t n = series.size();
  const std::size_t p = static_cast<std::size_t>(lags_);
  if (n <= 10 * p) throw DomainError("EWD: series too short for the AR order");
  in_sample_ = n;
  mean_ = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);

  // AR(p) on the demeaned data, no intercept.
  const std::size_t rows = n - p;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), lags_);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + p;
    y(static_cast<Eigen::Index>(r)) = series[t] - mean_;
    for (std::size_t i = 1; i <= p; ++i) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i - 1)) = series[t - i] - mean_;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < lags_) throw EstimationError("EWD: singular AR design");
  Eigen::VectorXd b = qr.solve(y);
  phi_.assign(b.data(), b.data() + b.size());
  if (ar_spectral_radius(phi_) >= 1.0) throw EstimationError("EWD: AR fit has a unit or explosive root");

  const std::size_t width = std::size_t{1} << scales_;
  const std::size_t innov_count = n - p;
  if (kmax_ == 0) {
    const std::size_t by_trunc = (truncation_ ? truncation_ : width * 32) / width;
    kmax_ = std::max<std::size_t>(1, std::min(by_trunc, innov_count / (2 * width)));
  }
  const std::size_t window = kmax_ * width;
  const std::size_t big_n = std::max(truncation_ ? truncation_ : width * 32, window);
  alpha_.assign(big_n, 0.0);
  alpha_[0] = 1.0;
  for (std::size_t h = 1; h < big_n; ++h) {
    for (std::size_t i = 1; i <= std::min(h, p); ++i) alpha_[h] += phi_[i - 1] * alpha_[h - i];
  }

  beta_.assign(static_cast<std::size_t>(scales_), {});
  for (int j = 1; j <= scales_; ++j) {
    const std::size_t w = std::size_t{1} << j, half = w / 2;
    const std::size_t shifts = window / w;
    auto& bj = beta_[static_cast<std::size_t>(j - 1)];
    bj.assign(shifts, 0.0);
    for (std::size_t k = 0; k < shifts; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < half; ++i) s += alpha_[k * w + i] - alpha_[k * w + half + i];
      bj[k] = s / std::sqrt(static_cast<double>(w));
    }
  }

  // Components x^{j}_t on the fully supported range and the weight regression.
  const auto e = innovations(series);
  const std::size_t first = p + window - 1;
  if (n < first + static_cast<std::size_t>(scales_) + 10) {
    throw DomainError("EWD: too few supported observations for the weight regression");
  }
  const std::size_t m = n - first;
  Eigen::MatrixXd comp(static_cast<Eigen::Index>(m), scales_);
  Eigen::VectorXd target(static_cast<Eigen::Index>(m));
  for (std::size_t t = first; t < n; ++t) {
    target(static_cast<Eigen::Index>(t - first)) = series[t] - mean_;
    for (int j = 1; j <= scales_; ++j) {
      const std::size_t w = std::size_t{1} << j, half = w / 2;
      const auto& bj = beta_[static_cast<std::size_t>(j - 1)];
      double acc = 0.0;
      for (std::size_t k = 0; k < bj.size(); ++k) {
        const std::size_t s = t - k * w;
        double shock = 0.0;
        for (std::size_t i = 0; i < half; ++i) shock += e[s - i] - e[s - half - i];
        acc += bj[k] * shock / std::sqrt(static_cast<double>(w));
      }
      comp(static_cast<Eigen::Index>(t - first), j - 1) = acc;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> wqr(comp);
  Eigen::VectorXd wv = wqr.solve(target);
  weights_.assign(wv.data(), wv.data() + wv.size());
}

double StationaryEwd::forecast(std::span<const double> history, int h) const {
  if (in_sample_ == 0) throw DomainError("EWD: forecast before fit");
  if (h < 1) throw DomainError("forecast horizon must be >= 1");
  const auto e = innovations(history);
  const std::size_t origin = history.size() - 1;
  const std::size_t target = origin + static_cast<std::size_t>(h);
  const std::size_t p = phi_.size();
  double total = mean_;
  for (int j = 1; j <= scales_; ++j) {
    const std::size_t w = std::size_t{1} << j, half = w / 2;
    const auto& bj = beta_[static_cast<std::size_t>(j - 1)];
    double part = 0.0;
    for (std::size_t k = 0; k < bj.size() && k * w <= target; ++k) {
      const std::size_t s = target - k * w;
      double shock = 0.0;
      for (std::size_t i = 0; i < w && i <= s; ++i) {
        const std::size_t tau = s - i;
        if (tau > origin) continue;
        if (tau < p) throw DomainError("EWD: forecast needs pre-sample innovations");
        shock += (i < half ? 1.0 : -1.0) * e[tau];
      }
      part += bj[k] * shock / std::sqrt(static_cast<double>(w));
    }
    total += weights_[static_cast<std::size_t>(j - 1)] * part;
  }
  return total;
}

// ---------------------------------------------------------------------------

ForecastConfig TvEwdSchedule::for_horizon(int h) const {
  ForecastConfig c = base;
  c.horizon = h;
  for (const auto& [hh, j, p] : per_horizon) {
    if (hh == h) {
      c.scales = j;
      c.lags = p;
    }
  }
  return c;
}

namespace {

class ArModel final : public ForecastModel {
 public:
  explicit ArModel(int p) : p_(p) {}
  std::string name() const override { return "ar" + std::to_string(p_); }
  void fit(std::span<const double> x) override { coef_ = fit_ar(x, p_); }
  double predict(std::span<const double> history, int h) const override {
    return coef_.forecast(history, h);
  }

 private:
  int p_;
  ArCoefficients coef_;
};

class HarModel final : public ForecastModel {
 public:
  std::string name() const override { return "har"; }
  void fit(std::span<const double> x) override { coef_ = fit_har(x); }
  double predict(std::span<const double> history, int h) const override {
    return coef_.forecast(history, h);
  }

 private:
  HarCoefficients coef_;
};

class TvArModel final : public ForecastModel {
 public:
  TvArModel(int p, double b) : p_(p), b_(b) {}
  std::string name() const override { return "tvar" + std::to_string(p_); }
  void fit(std::span<const double> x) override {
    const Eigen::VectorXd c = fit_tv(x, TvKind::ar_p, p_, b_).boundary();
    coef_.intercept = c(0);
    coef_.phi.assign(c.data() + 1, c.data() + c.size());
  }
  double predict(std::span<const double> history, int h) const override {
    return coef_.forecast(history, h);
  }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"lags", p_}, {"bandwidth", b_}};
  }

 private:
  int p_;
  double b_;
  ArCoefficients coef_;
};

class TvHarModel final : public ForecastModel {
 public:
  explicit TvHarModel(double b) : b_(b) {}
  std::string name() const override { return "tvhar"; }
  void fit(std::span<const double> x) override {
    const Eigen::VectorXd c = fit_tv(x, TvKind::har, 0, b_).boundary();
    coef_ = {c(0), c(1), c(2), c(3)};
  }
  double predict(std::span<const double> history, int h) const override {
    return coef_.forecast(history, h);
  }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"bandwidth", b_}};
  }

 private:
  double b_;
  HarCoefficients coef_;
};

class EwdModel final : public ForecastModel {
 public:
  EwdModel(int j, int p, std::size_t kmax) : ewd_(j, p, kmax) {}
  std::string name() const override { return "ewd"; }
  void fit(std::span<const double> x) override { ewd_.fit(x); }
  double predict(std::span<const double> history, int h) const override {
    return ewd_.forecast(history, h);
  }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"scales", ewd_.scales()}, {"kmax", static_cast<double>(ewd_.kmax())}};
  }

 private:
  StationaryEwd ewd_;
};

class TvEwdForecastModel final : public ForecastModel {
 public:
  explicit TvEwdForecastModel(ForecastConfig c) : config_(std::move(c)) {}
  std::string name() const override { return "tvewd"; }
  void fit(std::span<const double> x) override { model_.emplace(TvEwdModel::fit(x, config_)); }
  double predict(std::span<const double> history, int h) const override {
    return model_->forecast_from(history, h);
  }
  std::vector<std::pair<std::string, double>> parameters() const override {
    const auto& m = *model_;
    return {{"scales", m.config().scales},
            {"lags", m.config().lags},
            {"trend_bandwidth", m.trend().bandwidth},
            {"ma_bandwidth", m.tvar().ar_bandwidth},
            {"kmax", static_cast<double>(m.decomposition().kmax())},
            {"truncation", static_cast<double>(m.ma().truncation())}};
  }

 private:
  ForecastConfig config_;
  std::optional<TvEwdModel> model_;
};

// Refits a fresh model on the full history at every origin.
class RecursiveModel final : public ForecastModel {
 public:
  RecursiveModel(ModelSpec spec, int horizon) : spec_(std::move(spec)), horizon_(horizon) {
    spec_.recursive = false;
  }
  std::string name() const override { return spec_.name; }
  void fit(std::span<const double> x) override { make_model(spec_, horizon_)->fit(x); }
  double predict(std::span<const double> history, int h) const override {
    auto m = make_model(spec_, horizon_);
    m->fit(history);
    return m->predict(history, h);
  }

 private:
  ModelSpec spec_;
  int horizon_;
};

bool parse_suffix(const std::string& name, const std::string& prefix, int& out) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return false;
  const std::string rest = name.substr(prefix.size());
  if (!std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
  out = std::stoi(rest);
  return out >= 1;
}

}  // namespace

std::unique_ptr<ForecastModel> make_model(const ModelSpec& spec, int horizon) {
  if (spec.recursive) return std::make_unique<RecursiveModel>(spec, horizon);
  int p = 0;
  if (spec.name == "har") return std::make_unique<HarModel>();
  if (spec.name == "tvhar") return std::make_unique<TvHarModel>(spec.tv_bandwidth);
  if (spec.name == "ewd") return std::make_unique<EwdModel>(spec.ewd_scales, spec.ewd_lags, spec.ewd_kmax);
  if (spec.name == "tvewd") return std::make_unique<TvEwdForecastModel>(spec.tvewd.for_horizon(horizon));
  if (parse_suffix(spec.name, "tvar", p)) return std::make_unique<TvArModel>(p, spec.tv_bandwidth);
  if (parse_suffix(spec.name, "ar", p)) return std::make_unique<ArModel>(p);
  throw DomainError("unknown model '" + spec.name +
                    "' (expected arP, har, tvarP, tvhar, ewd or tvewd)");
}

std::vector<std::string> parse_model_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
    ModelSpec probe;
    probe.name = item;
    make_model(probe, 1);
    out.push_back(item);
  }
  if (out.empty()) throw DomainError("empty model list");
  return out;
}

}  // namespace tvewd
