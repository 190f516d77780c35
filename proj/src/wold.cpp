#include "tvewd/wold.hpp"

#include <cmath>
#include <exception>
#include <string>

#include <Eigen/Eigenvalues>

#include "tvewd/error.hpp"
#include "tvewd/local_linear.hpp"

namespace tvewd {
namespace {

constexpr int kGrowthRun = 10;

struct Inversion {
  bool clamped = false;
};

// Fills row `out` with the recursion; returns whether explosive growth was cut.
Inversion invert_row(std::span<const double> phi, bool nonstationary, double* out,
                     std::size_t n) {
  Inversion info;
  const std::size_t p = phi.size();
  out[0] = 1.0;
  int run = 0;
  for (std::size_t h = 1; h < n; ++h) {
    double a = 0.0;
    const std::size_t top = std::min(h, p);
    for (std::size_t i = 1; i <= top; ++i) a += phi[i - 1] * out[h - i];
    out[h] = a;
    if (!nonstationary) continue;
    run = std::abs(a) > std::abs(out[h - 1]) ? run + 1 : 0;
    if ((run >= kGrowthRun && std::abs(a) > 1.0) || !std::isfinite(a)) {
      for (std::size_t k = h; k < n; ++k) out[k] = 0.0;
      info.clamped = true;
      break;
    }
  }
  return info;
}

}  // namespace

MaRepresentation MaRepresentation::from_alpha(std::vector<double> grid, RowMatrix alpha,
                                              double tail_tol) {
  if (static_cast<std::size_t>(alpha.rows()) != grid.size()) {
    throw DomainError("MA representation: alpha rows differ from grid size");
  }
  MaRepresentation ma;
  ma.grid = std::move(grid);
  ma.alpha = std::move(alpha);
  ma.tail_tol = tail_tol;
  const auto n = ma.alpha.cols();
  ma.stationary.assign(ma.grid.size(), true);
  ma.clamped.assign(ma.grid.size(), false);
  ma.tail_converged.resize(ma.grid.size());
  for (std::size_t i = 0; i < ma.grid.size(); ++i) {
    ma.tail_converged[i] = n == 0 || std::abs(ma.alpha(static_cast<Eigen::Index>(i), n - 1)) <= tail_tol;
  }
  return ma;
}

std::size_t default_truncation(int scales) {
  if (scales < 1 || scales > 20) throw DomainError("number of scales must lie in [1,20]");
  return (std::size_t{1} << scales) * 32;
}

double ar_spectral_radius(std::span<const double> phi) {
  const auto p = static_cast<Eigen::Index>(phi.size());
  if (p == 0) return 0.0;
  if (p == 1) return std::abs(phi[0]);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) companion(0, i) = phi[i];
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> ar_to_ma(std::span<const double> phi, std::size_t truncation) {
  if (truncation < 1) throw DomainError("MA truncation must be >= 1");
  std::vector<double> alpha(truncation);
  invert_row(phi, false, alpha.data(), truncation);
  return alpha;
}

MaRepresentation ar_to_ma(const TvArFit& fit, const MaOptions& options) {
  if (options.truncation < 2) throw DomainError("MA truncation must be >= 2");
  if (fit.phi.rows() != static_cast<Eigen::Index>(fit.grid.size())) {
    throw DomainError("TV-AR fit: coefficient rows differ from grid size");
  }
  MaRepresentation ma;
  ma.grid = fit.grid;
  ma.tail_tol = options.tail_tol;
  const auto g = static_cast<std::ptrdiff_t>(fit.grid.size());
  const std::size_t n = options.truncation;
  const std::size_t p = static_cast<std::size_t>(fit.lag_order);
  ma.alpha.resize(g, static_cast<Eigen::Index>(n));
  ma.stationary.assign(fit.grid.size(), true);
  ma.tail_converged.assign(fit.grid.size(), true);
  ma.clamped.assign(fit.grid.size(), false);
  std::vector<char> stationary(fit.grid.size()), tail(fit.grid.size()), clamped(fit.grid.size());
  std::vector<std::exception_ptr> errors(fit.grid.size());

#pragma omp parallel for schedule(static) if (options.parallel)
  for (std::ptrdiff_t i = 0; i < g; ++i) {
    std::vector<double> phi(p);
    for (std::size_t k = 0; k < p; ++k) phi[k] = fit.phi(i, static_cast<Eigen::Index>(k));
    const bool stable = ar_spectral_radius(phi) < 1.0;
    double* row = ma.alpha.row(i).data();
    const auto info = invert_row(phi, !stable, row, n);
    stationary[i] = stable;
    clamped[i] = info.clamped;
    tail[i] = std::abs(row[n - 1]) <= options.tail_tol;
    if (info.clamped && !options.allow_nonstationary) {
      errors[i] = std::make_exception_ptr(EstimationError(
          "explosive local AR polynomial at u=" + std::to_string(fit.grid[i]) +
          " (Wold coefficients diverge); pass allow-nonstationary to flag and continue"));
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (std::size_t i = 0; i < fit.grid.size(); ++i) {
    ma.stationary[i] = stationary[i];
    ma.tail_converged[i] = tail[i];
    ma.clamped[i] = clamped[i];
  }
  return ma;
}

}  // namespace tvewd
