#include "tvewd/reference.hpp"

#include <cmath>

#include "tvewd/error.hpp"

namespace tvewd::reference {

LocalEstimate local_linear_fit(const LocalLinearRegression& reg, double u, const Kernel& kernel,
                               double b) {
  const auto q = static_cast<Eigen::Index>(reg.cols());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(2 * q, 2 * q);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * q);
  LocalEstimate est;
  est.bandwidth = b;
  for (std::size_t r = 0; r < reg.rows(); ++r) {
    const double d = reg.times()[r] - u;
    const double w = kernel.scaled(d, b);
    if (w > 0.0) ++est.support;
    Eigen::VectorXd z(2 * q);
    z.head(q) = reg.regressors().row(static_cast<Eigen::Index>(r)).transpose();
    z.tail(q) = d * z.head(q);
    gram += w * z * z.transpose();
    rhs += w * reg.response()[r] * z;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible()) throw EstimationError("reference: singular local design");
  const Eigen::VectorXd sol = lu.solve(rhs);
  est.level = sol.head(q);
  est.slope = sol.tail(q);
  return est;
}

std::vector<LocalEstimate> fit_on_grid(const LocalLinearRegression& reg,
                                       std::span<const double> grid, const Kernel& kernel,
                                       double b) {
  std::vector<LocalEstimate> out;
  out.reserve(grid.size());
  for (double u : grid) out.push_back(local_linear_fit(reg, u, kernel, b));
  return out;
}

MaRepresentation ar_to_ma(const TvArFit& fit, std::size_t truncation) {
  const auto g = static_cast<Eigen::Index>(fit.grid.size());
  RowMatrix alpha = RowMatrix::Zero(g, static_cast<Eigen::Index>(truncation));
  for (Eigen::Index i = 0; i < g; ++i) {
    alpha(i, 0) = 1.0;
    for (Eigen::Index h = 1; h < alpha.cols(); ++h) {
      for (Eigen::Index k = 1; k <= std::min<Eigen::Index>(h, fit.lag_order); ++k) {
        alpha(i, h) += fit.phi(i, k - 1) * alpha(i, h - k);
      }
    }
  }
  return MaRepresentation::from_alpha(fit.grid, std::move(alpha));
}

ScaleBetas scale_betas(const MaRepresentation& ma, int scales, std::size_t kmax) {
  ScaleBetas out;
  out.scales = scales;
  out.kmax = kmax;
  out.grid = ma.grid;
  if (ma.truncation() < out.lag_window()) throw DomainError("reference: truncation too short");
  const auto g = static_cast<Eigen::Index>(ma.points());
  for (int j = 1; j <= scales; ++j) {
    const std::size_t width = std::size_t{1} << j;
    const std::size_t half = width / 2;
    RowMatrix beta(g, static_cast<Eigen::Index>(out.shifts(j)));
    for (Eigen::Index i = 0; i < g; ++i) {
      for (std::size_t k = 0; k < out.shifts(j); ++k) {
        double plus = 0.0, minus = 0.0;
        for (std::size_t s = 0; s < half; ++s) plus += ma.alpha(i, static_cast<Eigen::Index>(k * width + s));
        for (std::size_t s = 0; s < half; ++s) minus += ma.alpha(i, static_cast<Eigen::Index>(k * width + half + s));
        beta(i, static_cast<Eigen::Index>(k)) = (plus - minus) / std::sqrt(static_cast<double>(width));
      }
    }
    out.beta.push_back(std::move(beta));
  }
  return out;
}

std::vector<AlignedSeries> haar_detail_shocks(const AlignedSeries& innovations, int scales) {
  std::vector<AlignedSeries> out;
  for (int j = 1; j <= scales; ++j) {
    const std::size_t width = std::size_t{1} << j;
    const std::size_t half = width / 2;
    AlignedSeries s;
    s.first = innovations.first + width - 1;
    for (std::size_t t = s.first; t < innovations.end(); ++t) {
      double plus = 0.0, minus = 0.0;
      for (std::size_t i = 0; i < half; ++i) plus += innovations[t - i];
      for (std::size_t i = 0; i < half; ++i) minus += innovations[t - half - i];
      s.values.push_back((plus - minus) / std::sqrt(static_cast<double>(width)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AlignedSeries> scale_components(const ScaleBetas& betas,
                                            const std::vector<AlignedSeries>& shocks,
                                            std::size_t length) {
  std::vector<AlignedSeries> out;
  const std::size_t start = shocks[0].first - 1 + betas.lag_window() - 1;
  for (int j = 1; j <= betas.scales; ++j) {
    const auto& shock = shocks[static_cast<std::size_t>(j - 1)];
    const std::size_t width = std::size_t{1} << j;
    AlignedSeries c;
    c.first = start;
    for (std::size_t t = start; t < shock.end(); ++t) {
      const double u = rescaled_time(t, length);
      double acc = 0.0;
      for (std::size_t k = 0; k < betas.shifts(j); ++k) {
        std::vector<double> col(betas.grid.size());
        for (std::size_t g = 0; g < col.size(); ++g) col[g] = betas.at(g, j, k);
        acc += interpolate(betas.grid, col, u) * shock[t - k * width];
      }
      c.values.push_back(acc);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tvewd::reference
