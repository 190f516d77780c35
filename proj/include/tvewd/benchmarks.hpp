#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tvewd/forecaster.hpp"
#include "tvewd/kernel.hpp"
#include "tvewd/linalg.hpp"

namespace tvewd {

/// A model fitted once on the in-sample data and then asked for h-step
/// forecasts from later origins with frozen parameters.
class ForecastModel {
 public:
  virtual ~ForecastModel() = default;
  virtual std::string name() const = 0;
  virtual void fit(std::span<const double> in_sample) = 0;
  /// `history` is the in-sample data followed by realized values up to the origin.
  virtual double predict(std::span<const double> history, int h) const = 0;
  /// Effective estimation settings after fit (e.g. CV-chosen bandwidths).
  virtual std::vector<std::pair<std::string, double>> parameters() const { return {}; }
};

// ---------------------------------------------------------------------------
// AR(p) and HAR by OLS.

struct ArCoefficients {
  double intercept = 0.0;
  std::vector<double> phi;
  /// Iterated h-step forecast from the end of `history`.
  double forecast(std::span<const double> history, int h) const;
  double fitted(std::span<const double> x, std::size_t t) const;
};

ArCoefficients fit_ar(std::span<const double> series, int p);

struct HarCoefficients {
  double intercept = 0.0, daily = 0.0, weekly = 0.0, monthly = 0.0;
  /// Iterated forecast; rolling 5- and 22-day means absorb forecasted values.
  double forecast(std::span<const double> history, int h) const;
  double fitted(std::span<const double> x, std::size_t t) const;
};

HarCoefficients fit_har(std::span<const double> series);

// ---------------------------------------------------------------------------
// Local linear analogues (coefficients read at the boundary u = 1).

enum class TvKind { ar_p, har };

struct TvBenchmarkFit {
  TvKind kind = TvKind::ar_p;
  int lags = 0;                // AR order (ar_p)
  std::vector<double> grid;
  RowMatrix curves;            // grid x (1 + regressors), intercept first
  Eigen::VectorXd boundary() const { return curves.row(curves.rows() - 1).transpose(); }
};

TvBenchmarkFit fit_tv(std::span<const double> series, TvKind kind, int p, double bandwidth = 0.3,
                      const Kernel& kernel = Kernel{}, std::vector<double> grid = {1.0});

// ---------------------------------------------------------------------------
// Stationary extended Wold decomposition: one global AR(p) fit, constant
// alpha, beta and weights. Implemented independently of the TV-EWD path.

class StationaryEwd {
 public:
  StationaryEwd(int scales, int lags, std::size_t kmax, std::size_t truncation = 0);

  void fit(std::span<const double> series);
  double forecast(std::span<const double> history, int h) const;

  double mean() const noexcept { return mean_; }
  const std::vector<double>& phi() const noexcept { return phi_; }
  const std::vector<double>& alpha() const noexcept { return alpha_; }
  /// beta[j-1][k]
  const std::vector<std::vector<double>>& beta() const noexcept { return beta_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  int scales() const noexcept { return scales_; }
  std::size_t kmax() const noexcept { return kmax_; }

 private:
  std::vector<double> innovations(std::span<const double> history) const;

  int scales_, lags_;
  std::size_t kmax_, truncation_;
  double mean_ = 0.0;
  std::vector<double> phi_, alpha_, weights_;
  std::vector<std::vector<double>> beta_;
  std::size_t in_sample_ = 0;
};

// ---------------------------------------------------------------------------
// Model registry used by the evaluation harness and the CLI.

struct TvEwdSchedule {
  ForecastConfig base;
  /// Horizon-specific (J, p) overrides, e.g. {1:(5,2), 5:(5,5), 22:(7,15)}.
  std::vector<std::tuple<int, int, int>> per_horizon;
  ForecastConfig for_horizon(int h) const;
};

struct ModelSpec {
  std::string name;  // ar3, arP, har, tvar3, tvarP, tvhar, ewd, tvewd
  double tv_bandwidth = 0.3;
  int ewd_scales = 5;
  int ewd_lags = 2;
  std::size_t ewd_kmax = 0;
  TvEwdSchedule tvewd;
  bool recursive = false;
};

std::unique_ptr<ForecastModel> make_model(const ModelSpec& spec, int horizon);

/// Splits "ar3,har,tvewd" into names, validating each.
std::vector<std::string> parse_model_list(const std::string& list);

}  // namespace tvewd
