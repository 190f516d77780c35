#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvewd/kernel.hpp"
#include "tvewd/linalg.hpp"
#include "tvewd/series.hpp"

namespace tvewd {

enum class SolveMode {
  strict,      // rank-deficient local design -> EstimationError
  least_norm,  // rank-deficient local design -> minimum-norm solution
};

/// Record of a locally widened window (fewer than 2q+2 positively weighted rows).
struct WindowAdjustment {
  double u = 0.0;
  double requested = 0.0;
  double used = 0.0;
};

struct LocalEstimate {
  Eigen::VectorXd level;  // theta(u)
  Eigen::VectorXd slope;  // theta'(u)
  double bandwidth = 0.0;
  std::size_t support = 0;  // rows with positive weight
  bool rank_deficient = false;
};

/// Kernel-weighted local linear regression of y_t on X_t with coefficients
/// theta(u) + theta'(u)(t/T - u). Rows must be sorted by time.
class LocalLinearRegression {
 public:
  LocalLinearRegression(std::vector<double> response, Eigen::MatrixXd regressors,
                        std::vector<double> times);

  std::size_t rows() const noexcept { return y_.size(); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(x_.cols()); }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> response() const noexcept { return y_; }
  const Eigen::MatrixXd& regressors() const noexcept { return x_; }

  LocalEstimate fit_at(double u, const Kernel& kernel, double b,
                       SolveMode mode = SolveMode::strict) const;

  /// Leave-one-out prediction of row r: the fit at u = t_r with row r removed,
  /// evaluated at X_r. Returns nullopt when that fit is rank-deficient.
  std::optional<double> loo_prediction(std::size_t r, const Kernel& kernel, double b) const;

 private:
  struct Window {
    std::size_t lo, hi;
  };
  Window window(double u, double reach) const;
  std::size_t positive_rows(double u, const Kernel& kernel, double b,
                            std::optional<std::size_t> exclude) const;
  double widen(double u, const Kernel& kernel, double b,
               std::optional<std::size_t> exclude) const;
  void accumulate(double u, const Kernel& kernel, double b, std::optional<std::size_t> exclude,
                  Eigen::MatrixXd& gram, Eigen::VectorXd& rhs) const;

  std::vector<double> y_;
  Eigen::MatrixXd x_;
  std::vector<double> times_;
};

/// Solve the (2q x 2q) normal equations after Jacobi scaling. Returns false
/// when the system is rank deficient (the solution is then minimum-norm).
bool solve_normal_equations(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                            Eigen::VectorXd& solution);

struct GridOptions {
  /// Evaluation points in (0,1]; empty means every observation time t/T.
  std::vector<double> grid;
  bool parallel = true;
};

/// `points` evenly spaced grid points from 1/T to 1; 0 means observation times.
std::vector<double> make_grid(std::size_t length, std::size_t points = 0);

/// Piecewise-linear interpolation of grid values, constant beyond the ends.
double interpolate(std::span<const double> grid, std::span<const double> values, double u);

/// Fit at every grid point; the first failure (lowest grid index) is rethrown.
std::vector<LocalEstimate> fit_on_grid(const LocalLinearRegression& reg,
                                       std::span<const double> grid, const Kernel& kernel,
                                       double b, SolveMode mode, bool parallel);

struct TrendFit {
  std::vector<double> grid;
  std::vector<double> level;  // phi0(u)
  std::vector<double> slope;  // phi0'(u)
  double bandwidth = 0.0;
  std::vector<double> centered;  // x_t - phi0(t/T)
  std::vector<WindowAdjustment> adjustments;

  double at(double u) const { return interpolate(grid, level, u); }
};

/// Local linear estimate of the time-varying mean and the centered series.
TrendFit estimate_trend(std::span<const double> series, const Kernel& kernel, Bandwidth b,
                        const GridOptions& options = {});

/// Trend fixed at a single level (used for stationary reductions).
TrendFit constant_trend(std::span<const double> series, double level,
                        std::span<const double> grid = {});

struct TvArFit {
  int lag_order = 0;
  std::size_t sample_length = 0;
  std::vector<double> grid;
  std::vector<double> phi0;        // intercept curve on the grid (zero if data were pre-centered)
  RowMatrix phi;                   // grid x p
  RowMatrix phi_slope;             // grid x p
  AlignedSeries innovations;       // positions p..T-1
  double trend_bandwidth = 0.0;    // 0 when no trend was estimated
  double ar_bandwidth = 0.0;
  std::vector<bool> locally_stationary;  // local AR roots outside the unit circle
  std::vector<WindowAdjustment> adjustments;

  /// phi_1..phi_p at u, interpolated linearly between grid points.
  Eigen::VectorXd coefficients_at(double u) const;
  /// Coefficients at the last grid point (u = 1 for standard grids).
  Eigen::VectorXd boundary_coefficients() const;
};

/// Local linear TV-AR(p) on a centered series.
TvArFit estimate_tvar(std::span<const double> centered, int p, const Kernel& kernel, Bandwidth b,
                      const GridOptions& options = {});

/// Constant coefficient curves with innovations computed from them.
TvArFit constant_tvar_fit(std::span<const double> centered, std::span<const double> phi,
                          std::span<const double> grid = {});

/// e_t = x_t - sum_i phi_i(t/T) x_{t-i} for t = p..T-1.
AlignedSeries tvar_innovations(std::span<const double> centered, const TvArFit& fit);

struct CvResult {
  Bandwidth selected{1.0};
  std::vector<double> candidates;
  std::vector<double> scores;  // mean squared LOO error, NaN where the candidate failed
  std::vector<std::string> failures;
};

/// {0.05, 0.10, ..., 0.60}
std::vector<double> default_bandwidth_candidates();

/// Leave-one-out prediction-error CV for the TV-AR(p) bandwidth. Ties go to the larger b.
CvResult cross_validate_bandwidth(std::span<const double> centered, int p, const Kernel& kernel,
                                  std::span<const double> candidates, bool parallel = true);

/// Leave-one-out smoothing CV for the trend bandwidth.
CvResult cross_validate_trend_bandwidth(std::span<const double> series, const Kernel& kernel,
                                        std::span<const double> candidates, bool parallel = true);

/// Regression rows of an AR(p) on `x` (optionally with an intercept column);
/// row r corresponds to position r + p, at rescaled time (r+p+1)/T.
LocalLinearRegression ar_regression(std::span<const double> x, int p, bool intercept);

}  // namespace tvewd
