#include "tvewd/local_linear.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>

#include "tvewd/error.hpp"
#include "tvewd/wold.hpp"

namespace tvewd {
namespace {

constexpr double kWidenFactor = 1.5;
constexpr double kRankThreshold = 1e-12;

std::string fmt_u(double u) {
  std::ostringstream os;
  os.precision(6);
  os << u;
  return os.str();
}

void require_effective_sample(std::size_t length, double b, const char* what) {
  if (static_cast<double>(length) * b < 5.0) {
    throw DomainError(std::string(what) + ": T*b = " + std::to_string(length * b) +
                      " < 5 effective observations");
  }
}

}  // namespace

LocalLinearRegression::LocalLinearRegression(std::vector<double> response,
                                             Eigen::MatrixXd regressors, std::vector<double> times)
    : y_(std::move(response)), x_(std::move(regressors)), times_(std::move(times)) {
  if (y_.size() != static_cast<std::size_t>(x_.rows()) || y_.size() != times_.size()) {
    throw DomainError("local regression: response, regressors and times differ in length");
  }
  if (y_.empty() || x_.cols() == 0) throw DomainError("local regression: empty design");
  if (!std::is_sorted(times_.begin(), times_.end())) {
    throw DomainError("local regression: rows must be sorted by time");
  }
}

LocalLinearRegression::Window LocalLinearRegression::window(double u, double reach) const {
  auto lo = std::lower_bound(times_.begin(), times_.end(), u - reach);
  auto hi = std::upper_bound(times_.begin(), times_.end(), u + reach);
  return {static_cast<std::size_t>(lo - times_.begin()),
          static_cast<std::size_t>(hi - times_.begin())};
}

std::size_t LocalLinearRegression::positive_rows(double u, const Kernel& kernel, double b,
                                                 std::optional<std::size_t> exclude) const {
  const auto [lo, hi] = window(u, kernel.support() * b);
  std::size_t n = 0;
  for (std::size_t r = lo; r < hi; ++r) {
    if (exclude && *exclude == r) continue;
    if (kernel((times_[r] - u) / b) > 0.0) ++n;
  }
  return n;
}

double LocalLinearRegression::widen(double u, const Kernel& kernel, double b,
                                    std::optional<std::size_t> exclude) const {
  const std::size_t need = 2 * cols() + 2;
  while (positive_rows(u, kernel, b, exclude) < need) {
    const double reach = kernel.support() * b;
    if (u - reach < times_.front() && u + reach > times_.back()) {
      throw EstimationError("local window at u=" + fmt_u(u) + " has fewer than " +
                            std::to_string(need) + " positively weighted observations");
    }
    b *= kWidenFactor;
  }
  return b;
}

void LocalLinearRegression::accumulate(double u, const Kernel& kernel, double b,
                                       std::optional<std::size_t> exclude, Eigen::MatrixXd& gram,
                                       Eigen::VectorXd& rhs) const {
  const Eigen::Index q = x_.cols();
  gram.setZero(2 * q, 2 * q);
  rhs.setZero(2 * q);
  Eigen::VectorXd z(2 * q);
  const auto [lo, hi] = window(u, kernel.support() * b);
  for (std::size_t r = lo; r < hi; ++r) {
    if (exclude && *exclude == r) continue;
    const double d = (times_[r] - u) / b;
    const double w = kernel(d) / b;
    if (w <= 0.0) continue;
    z.head(q) = x_.row(static_cast<Eigen::Index>(r)).transpose();
    z.tail(q) = d * z.head(q);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z, w);
    rhs.noalias() += (w * y_[r]) * z;
  }
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
}

bool solve_normal_equations(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                            Eigen::VectorXd& solution) {
  const Eigen::Index n = gram.rows();
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = gram(i, i);
    scale(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
  }
  const Eigen::MatrixXd a = scale.asDiagonal() * gram * scale.asDiagonal();
  const Eigen::VectorXd r = scale.asDiagonal() * rhs;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() == n) {
    solution = scale.asDiagonal() * qr.solve(r);
    return true;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(kRankThreshold);
  solution = scale.asDiagonal() * cod.solve(r);
  return false;
}

LocalEstimate LocalLinearRegression::fit_at(double u, const Kernel& kernel, double b,
                                            SolveMode mode) const {
  LocalEstimate est;
  est.bandwidth = widen(u, kernel, b, std::nullopt);
  est.support = positive_rows(u, kernel, est.bandwidth, std::nullopt);
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs, sol;
  accumulate(u, kernel, est.bandwidth, std::nullopt, gram, rhs);
  est.rank_deficient = !solve_normal_equations(gram, rhs, sol);
  if (est.rank_deficient && mode == SolveMode::strict) {
    throw EstimationError("singular local design at u=" + fmt_u(u));
  }
  const Eigen::Index q = x_.cols();
  est.level = sol.head(q);
  est.slope = sol.tail(q) / est.bandwidth;
  return est;
}

std::optional<double> LocalLinearRegression::loo_prediction(std::size_t r, const Kernel& kernel,
                                                            double b) const {
  const double u = times_[r];
  const double used = widen(u, kernel, b, r);
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs, sol;
  accumulate(u, kernel, used, r, gram, rhs);
  if (!solve_normal_equations(gram, rhs, sol)) return std::nullopt;
  return x_.row(static_cast<Eigen::Index>(r)).dot(sol.head(x_.cols()));
}

std::vector<double> make_grid(std::size_t length, std::size_t points) {
  if (points == 0 || points >= length) return observation_grid(length);
  if (points < 2) throw DomainError("grid needs at least 2 points");
  std::vector<double> grid(points);
  const double lo = 1.0 / static_cast<double>(length);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (1.0 - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = 1.0;
  return grid;
}

double interpolate(std::span<const double> grid, std::span<const double> values, double u) {
  if (grid.empty()) throw DomainError("interpolate: empty grid");
  if (u <= grid.front()) return values.front();
  if (u >= grid.back()) return values.back();
  const auto it = std::lower_bound(grid.begin(), grid.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (*it == u) return values[i];
  const double w = (u - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return (1.0 - w) * values[i - 1] + w * values[i];
}

std::vector<LocalEstimate> fit_on_grid(const LocalLinearRegression& reg,
                                       std::span<const double> grid, const Kernel& kernel,
                                       double b, SolveMode mode, bool parallel) {
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  std::vector<LocalEstimate> out(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = reg.fit_at(grid[i], kernel, b, mode);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

std::vector<double> resolve_grid(const GridOptions& options, std::size_t length) {
  if (options.grid.empty()) return observation_grid(length);
  for (std::size_t i = 0; i < options.grid.size(); ++i) {
    RescaledTime check(options.grid[i]);
    if (i > 0 && !(options.grid[i] > options.grid[i - 1])) {
      throw DomainError("grid points must be strictly increasing");
    }
  }
  return options.grid;
}

void collect_adjustments(const std::vector<LocalEstimate>& est, std::span<const double> grid,
                         double b, std::vector<WindowAdjustment>& out) {
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (est[i].bandwidth != b) out.push_back({grid[i], b, est[i].bandwidth});
  }
}

}  // namespace

TrendFit estimate_trend(std::span<const double> series, const Kernel& kernel, Bandwidth b,
                        const GridOptions& options) {
  const std::size_t n = series.size();
  require_effective_sample(n, b.value(), "trend estimation");
  LocalLinearRegression reg(std::vector<double>(series.begin(), series.end()),
                            Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), 1),
                            observation_grid(n));
  TrendFit fit;
  fit.grid = resolve_grid(options, n);
  fit.bandwidth = b.value();
  const auto est = fit_on_grid(reg, fit.grid, kernel, b.value(), SolveMode::strict,
                               options.parallel);
  fit.level.resize(est.size());
  fit.slope.resize(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    fit.level[i] = est[i].level(0);
    fit.slope[i] = est[i].slope(0);
  }
  collect_adjustments(est, fit.grid, b.value(), fit.adjustments);
  fit.centered.resize(n);
  for (std::size_t t = 0; t < n; ++t) fit.centered[t] = series[t] - fit.at(rescaled_time(t, n));
  return fit;
}

TrendFit constant_trend(std::span<const double> series, double level,
                        std::span<const double> grid) {
  TrendFit fit;
  fit.grid = grid.empty() ? observation_grid(series.size())
                          : std::vector<double>(grid.begin(), grid.end());
  fit.level.assign(fit.grid.size(), level);
  fit.slope.assign(fit.grid.size(), 0.0);
  fit.centered.resize(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) fit.centered[t] = series[t] - level;
  return fit;
}

LocalLinearRegression ar_regression(std::span<const double> x, int p, bool intercept) {
  if (p < 0) throw DomainError("lag order must be non-negative");
  const std::size_t lags = static_cast<std::size_t>(p);
  if (x.size() <= lags + 1) throw DomainError("series too short for " + std::to_string(p) + " lags");
  const std::size_t n = x.size();
  const std::size_t rows = n - lags;
  const Eigen::Index q = static_cast<Eigen::Index>(lags) + (intercept ? 1 : 0);
  if (q == 0) throw DomainError("empty AR design (p=0 without intercept)");
  std::vector<double> y(rows), times(rows);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), q);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + lags;
    y[r] = x[t];
    times[r] = rescaled_time(t, n);
    Eigen::Index c = 0;
    if (intercept) design(static_cast<Eigen::Index>(r), c++) = 1.0;
    for (std::size_t i = 1; i <= lags; ++i) design(static_cast<Eigen::Index>(r), c++) = x[t - i];
  }
  return LocalLinearRegression(std::move(y), std::move(design), std::move(times));
}

Eigen::VectorXd TvArFit::coefficients_at(double u) const {
  Eigen::VectorXd out(lag_order);
  if (grid.empty()) throw DomainError("TV-AR fit has an empty grid");
  if (u <= grid.front()) return phi.row(0).transpose();
  if (u >= grid.back()) return phi.row(phi.rows() - 1).transpose();
  const auto it = std::lower_bound(grid.begin(), grid.end(), u);
  const auto i = static_cast<Eigen::Index>(it - grid.begin());
  if (*it == u) return phi.row(i).transpose();
  const double w = (u - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return ((1.0 - w) * phi.row(i - 1) + w * phi.row(i)).transpose();
}

Eigen::VectorXd TvArFit::boundary_coefficients() const {
  return phi.row(phi.rows() - 1).transpose();
}

AlignedSeries tvar_innovations(std::span<const double> centered, const TvArFit& fit) {
  const std::size_t n = centered.size();
  const auto p = static_cast<std::size_t>(fit.lag_order);
  AlignedSeries e;
  e.first = p;
  e.values.resize(n - p);
  for (std::size_t t = p; t < n; ++t) {
    const Eigen::VectorXd c = fit.coefficients_at(rescaled_time(t, n));
    double v = centered[t];
    for (std::size_t i = 1; i <= p; ++i) v -= c(static_cast<Eigen::Index>(i - 1)) * centered[t - i];
    e.values[t - p] = v;
  }
  return e;
}

namespace {

void flag_stationarity(TvArFit& fit) {
  fit.locally_stationary.resize(fit.grid.size());
  std::vector<double> c(static_cast<std::size_t>(fit.lag_order));
  for (Eigen::Index i = 0; i < fit.phi.rows(); ++i) {
    for (int k = 0; k < fit.lag_order; ++k) c[k] = fit.phi(i, k);
    fit.locally_stationary[i] = ar_spectral_radius(c) < 1.0;
  }
}

}  // namespace

TvArFit estimate_tvar(std::span<const double> centered, int p, const Kernel& kernel, Bandwidth b,
                      const GridOptions& options) {
  const std::size_t n = centered.size();
  if (p < 1) throw DomainError("TV-AR lag order must be >= 1");
  if (n <= 10 * static_cast<std::size_t>(p)) {
    throw DomainError("TV-AR(" + std::to_string(p) + ") needs T > " + std::to_string(10 * p) +
                      ", got " + std::to_string(n));
  }
  require_effective_sample(n, b.value(), "TV-AR estimation");
  const auto reg = ar_regression(centered, p, false);

  TvArFit fit;
  fit.lag_order = p;
  fit.sample_length = n;
  fit.grid = resolve_grid(options, n);
  fit.ar_bandwidth = b.value();
  const auto est = fit_on_grid(reg, fit.grid, kernel, b.value(), SolveMode::strict,
                               options.parallel);
  const auto g = static_cast<Eigen::Index>(fit.grid.size());
  fit.phi.resize(g, p);
  fit.phi_slope.resize(g, p);
  fit.phi0.assign(fit.grid.size(), 0.0);
  for (Eigen::Index i = 0; i < g; ++i) {
    fit.phi.row(i) = est[i].level.transpose();
    fit.phi_slope.row(i) = est[i].slope.transpose();
  }
  collect_adjustments(est, fit.grid, b.value(), fit.adjustments);
  flag_stationarity(fit);
  fit.innovations = tvar_innovations(centered, fit);
  return fit;
}

TvArFit constant_tvar_fit(std::span<const double> centered, std::span<const double> phi,
                          std::span<const double> grid) {
  const std::size_t n = centered.size();
  const auto p = static_cast<int>(phi.size());
  if (p < 1) throw DomainError("constant TV-AR fit needs p >= 1");
  if (n <= phi.size() + 1) throw DomainError("series too short for constant TV-AR fit");
  TvArFit fit;
  fit.lag_order = p;
  fit.sample_length = n;
  fit.grid = grid.empty() ? observation_grid(n) : std::vector<double>(grid.begin(), grid.end());
  const auto g = static_cast<Eigen::Index>(fit.grid.size());
  fit.phi.resize(g, p);
  for (Eigen::Index i = 0; i < g; ++i)
    for (int k = 0; k < p; ++k) fit.phi(i, k) = phi[k];
  fit.phi_slope = RowMatrix::Zero(g, p);
  fit.phi0.assign(fit.grid.size(), 0.0);
  flag_stationarity(fit);
  fit.innovations = tvar_innovations(centered, fit);
  return fit;
}

std::vector<double> default_bandwidth_candidates() {
  std::vector<double> c;
  for (int i = 1; i <= 12; ++i) c.push_back(0.05 * i);
  return c;
}

namespace {

CvResult run_cv(const LocalLinearRegression& reg, std::size_t length, const Kernel& kernel,
                std::span<const double> candidates, bool parallel) {
  if (candidates.empty()) throw DomainError("bandwidth CV needs at least one candidate");
  CvResult res;
  res.candidates.assign(candidates.begin(), candidates.end());
  res.scores.assign(candidates.size(), std::numeric_limits<double>::quiet_NaN());
  const auto rows = static_cast<std::ptrdiff_t>(reg.rows());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double b = candidates[c];
    try {
      Bandwidth check(b);
      require_effective_sample(length, b, "bandwidth CV");
    } catch (const std::exception& e) {
      res.failures.push_back("b=" + fmt_u(b) + ": " + e.what());
      continue;
    }
    std::vector<double> sq(reg.rows(), 0.0);
    std::vector<char> failed(reg.rows(), 0);
    std::vector<std::string> why(reg.rows());
#pragma omp parallel for schedule(dynamic, 32) if (parallel)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      try {
        const auto pred = reg.loo_prediction(static_cast<std::size_t>(r), kernel, b);
        if (!pred) {
          failed[r] = 1;
          why[r] = "singular leave-one-out design at u=" + fmt_u(reg.times()[r]);
        } else {
          const double e = reg.response()[r] - *pred;
          sq[r] = e * e;
        }
      } catch (const std::exception& e) {
        failed[r] = 1;
        why[r] = e.what();
      }
    }
    const auto bad = std::find(failed.begin(), failed.end(), 1);
    if (bad != failed.end()) {
      res.failures.push_back("b=" + fmt_u(b) + ": " + why[bad - failed.begin()]);
      continue;
    }
    res.scores[c] = std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(sq.size());
  }
  double best = std::numeric_limits<double>::infinity();
  for (double s : res.scores)
    if (std::isfinite(s)) best = std::min(best, s);
  if (!std::isfinite(best)) {
    std::string msg = "bandwidth CV: every candidate failed";
    for (const auto& f : res.failures) msg += "; " + f;
    throw EstimationError(msg);
  }
  double chosen = -1.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (std::isfinite(res.scores[c]) && res.scores[c] <= best * (1.0 + 1e-12) &&
        candidates[c] > chosen) {
      chosen = candidates[c];
    }
  }
  res.selected = Bandwidth(chosen);
  return res;
}

}  // namespace

CvResult cross_validate_bandwidth(std::span<const double> centered, int p, const Kernel& kernel,
                                  std::span<const double> candidates, bool parallel) {
  if (p < 1) throw DomainError("bandwidth CV: lag order must be >= 1");
  const auto reg = ar_regression(centered, p, false);
  return run_cv(reg, centered.size(), kernel, candidates, parallel);
}

CvResult cross_validate_trend_bandwidth(std::span<const double> series, const Kernel& kernel,
                                        std::span<const double> candidates, bool parallel) {
  const std::size_t n = series.size();
  LocalLinearRegression reg(std::vector<double>(series.begin(), series.end()),
                            Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), 1),
                            observation_grid(n));
  return run_cv(reg, n, kernel, candidates, parallel);
}

}  // namespace tvewd
