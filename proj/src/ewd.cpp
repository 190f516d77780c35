#include "tvewd/ewd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tvewd/error.hpp"

namespace tvewd {
namespace {

struct GridPoint {
  Eigen::Index lo = 0, hi = 0;
  double w = 0.0;  // weight on hi
};

GridPoint locate(std::span<const double> grid, double u) {
  const auto last = static_cast<Eigen::Index>(grid.size()) - 1;
  if (u <= grid.front()) return {0, 0, 0.0};
  if (u >= grid.back()) return {last, last, 0.0};
  const auto it = std::lower_bound(grid.begin(), grid.end(), u);
  const auto i = static_cast<Eigen::Index>(it - grid.begin());
  if (*it == u) return {i, i, 0.0};
  return {i - 1, i, (u - grid[i - 1]) / (grid[i] - grid[i - 1])};
}

void check_scales(int scales) {
  if (scales < 1 || scales > 20) {
    throw DomainError("number of scales J must lie in [1,20], got " + std::to_string(scales));
  }
}

void check_window(std::size_t truncation, int scales, std::size_t kmax) {
  if (kmax < 1) throw DomainError("K_max must be >= 1");
  const std::size_t need = kmax << scales;
  if (truncation < need) {
    throw DomainError("MA truncation N=" + std::to_string(truncation) + " too short: J=" +
                      std::to_string(scales) + ", K_max=" + std::to_string(kmax) +
                      " require N >= " + std::to_string(need));
  }
}

// Prefix sums in extended precision; P[i] = sum of the first i values.
std::vector<long double> prefix_sums(std::span<const double> v) {
  std::vector<long double> p(v.size() + 1, 0.0L);
  for (std::size_t i = 0; i < v.size(); ++i) p[i + 1] = p[i] + v[i];
  return p;
}

}  // namespace

std::size_t default_kmax(std::size_t truncation, int scales) {
  check_scales(scales);
  return truncation >> scales;
}

std::vector<AlignedSeries> haar_detail_shocks(const AlignedSeries& innovations, int scales,
                                              bool parallel) {
  check_scales(scales);
  const std::size_t longest = std::size_t{1} << scales;
  if (innovations.size() < longest) {
    throw DomainError("Haar shocks at J=" + std::to_string(scales) + " need >= " +
                      std::to_string(longest) + " innovations, got " +
                      std::to_string(innovations.size()));
  }
  const auto pre = prefix_sums(innovations.values);
  std::vector<AlignedSeries> out(static_cast<std::size_t>(scales));
#pragma omp parallel for schedule(static) if (parallel)
  for (int j = 1; j <= scales; ++j) {
    const std::size_t width = std::size_t{1} << j;
    const std::size_t half = width / 2;
    const long double norm = 1.0L / std::sqrt(static_cast<long double>(width));
    AlignedSeries& s = out[static_cast<std::size_t>(j - 1)];
    s.first = innovations.first + width - 1;
    s.values.resize(innovations.size() - width + 1);
    // Local index i = position - innovations.first; the window is [i-width+1, i].
    for (std::size_t i = width - 1; i < innovations.size(); ++i) {
      const long double recent = pre[i + 1] - pre[i + 1 - half];
      const long double older = pre[i + 1 - half] - pre[i + 1 - width];
      s.values[i - (width - 1)] = static_cast<double>(norm * (recent - older));
    }
  }
  return out;
}

AlignedSeries lowpass_shocks(const AlignedSeries& innovations, int scales) {
  check_scales(scales);
  const std::size_t width = std::size_t{1} << scales;
  if (innovations.size() < width) {
    throw DomainError("low-pass shocks need >= " + std::to_string(width) + " innovations");
  }
  const auto pre = prefix_sums(innovations.values);
  const long double norm = 1.0L / std::sqrt(static_cast<long double>(width));
  AlignedSeries s;
  s.first = innovations.first + width - 1;
  s.values.resize(innovations.size() - width + 1);
  for (std::size_t i = width - 1; i < innovations.size(); ++i) {
    s.values[i - (width - 1)] = static_cast<double>(norm * (pre[i + 1] - pre[i + 1 - width]));
  }
  return s;
}

ScaleBetas scale_betas(const MaRepresentation& ma, int scales, std::size_t kmax, bool parallel) {
  check_scales(scales);
  check_window(ma.truncation(), scales, kmax);
  ScaleBetas out;
  out.scales = scales;
  out.kmax = kmax;
  out.grid = ma.grid;
  const auto g = static_cast<Eigen::Index>(ma.points());
  out.beta.resize(static_cast<std::size_t>(scales));
  for (int j = 1; j <= scales; ++j) {
    out.beta[static_cast<std::size_t>(j - 1)].resize(g, static_cast<Eigen::Index>(out.shifts(j)));
  }
  const std::size_t window = out.lag_window();

  // Haar pyramid: blocks at level l are sums of alpha over [m 2^l, (m+1) 2^l).
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < g; ++i) {
    std::vector<double> blocks(ma.alpha.row(i).data(), ma.alpha.row(i).data() + window);
    for (int j = 1; j <= scales; ++j) {
      const double norm = 1.0 / std::sqrt(static_cast<double>(std::size_t{1} << j));
      auto& beta = out.beta[static_cast<std::size_t>(j - 1)];
      const std::size_t k_count = out.shifts(j);
      for (std::size_t k = 0; k < k_count; ++k) {
        beta(i, static_cast<Eigen::Index>(k)) = norm * (blocks[2 * k] - blocks[2 * k + 1]);
        blocks[k] = blocks[2 * k] + blocks[2 * k + 1];
      }
      blocks.resize(k_count);
    }
  }
  return out;
}

std::vector<AlignedSeries> scale_components(const ScaleBetas& betas,
                                            const std::vector<AlignedSeries>& shocks,
                                            std::size_t length, bool parallel) {
  if (shocks.size() != static_cast<std::size_t>(betas.scales)) {
    throw DomainError("scale components: " + std::to_string(shocks.size()) +
                      " shock series for J=" + std::to_string(betas.scales));
  }
  // Shock j starts at first + 2^j - 1 for a common innovation start `first`.
  const std::size_t innov_first = shocks[0].first - 1;
  const std::size_t start = innov_first + betas.lag_window() - 1;
  const std::size_t stop = shocks[0].end();
  std::vector<AlignedSeries> out(shocks.size());
  for (auto& c : out) {
    c.first = start;
    c.values.assign(stop > start ? stop - start : 0, 0.0);
  }
  if (stop <= start) return out;
  const bool on_observations = betas.grid.size() == length && betas.grid.back() == 1.0;

  const auto count = static_cast<std::ptrdiff_t>(stop - start);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t n = 0; n < count; ++n) {
    const std::size_t t = start + static_cast<std::size_t>(n);
    const GridPoint gp = on_observations ? GridPoint{static_cast<Eigen::Index>(t),
                                                     static_cast<Eigen::Index>(t), 0.0}
                                         : locate(betas.grid, rescaled_time(t, length));
    for (int j = 1; j <= betas.scales; ++j) {
      const auto& beta = betas.beta[static_cast<std::size_t>(j - 1)];
      const auto& shock = shocks[static_cast<std::size_t>(j - 1)];
      const std::size_t stride = std::size_t{1} << j;
      double acc = 0.0;
      for (std::size_t k = 0; k < betas.shifts(j); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double b = gp.w == 0.0 ? beta(gp.lo, kk)
                                     : (1.0 - gp.w) * beta(gp.lo, kk) + gp.w * beta(gp.hi, kk);
        acc += b * shock[t - k * stride];
      }
      out[static_cast<std::size_t>(j - 1)].values[static_cast<std::size_t>(n)] = acc;
    }
  }
  return out;
}

ResidualComponent residual_component(const MaRepresentation& ma, int scales, std::size_t kmax,
                                     const AlignedSeries& innovations, std::size_t length) {
  check_scales(scales);
  check_window(ma.truncation(), scales, kmax);
  const std::size_t width = std::size_t{1} << scales;
  const double norm = 1.0 / std::sqrt(static_cast<double>(width));
  ResidualComponent res;
  const auto g = static_cast<Eigen::Index>(ma.points());
  res.gamma.resize(g, static_cast<Eigen::Index>(kmax));
  for (Eigen::Index i = 0; i < g; ++i) {
    for (std::size_t k = 0; k < kmax; ++k) {
      double s = 0.0;
      for (std::size_t h = 0; h < width; ++h) s += ma.alpha(i, static_cast<Eigen::Index>(k * width + h));
      res.gamma(i, static_cast<Eigen::Index>(k)) = norm * s;
    }
  }
  res.lowpass = lowpass_shocks(innovations, scales);
  const std::size_t start = innovations.first + kmax * width - 1;
  const std::size_t stop = innovations.end();
  res.series.first = start;
  if (stop <= start) return res;
  res.series.values.resize(stop - start);
  const bool on_observations = ma.grid.size() == length && ma.grid.back() == 1.0;
  for (std::size_t t = start; t < stop; ++t) {
    const GridPoint gp = on_observations ? GridPoint{static_cast<Eigen::Index>(t),
                                                     static_cast<Eigen::Index>(t), 0.0}
                                         : locate(ma.grid, rescaled_time(t, length));
    double acc = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const double c = (1.0 - gp.w) * res.gamma(gp.lo, kk) + gp.w * res.gamma(gp.hi, kk);
      acc += c * res.lowpass[t - k * width];
    }
    res.series.values[t - start] = acc;
  }
  return res;
}

PersistenceRatios persistence_ratios(const ScaleBetas& betas, std::size_t k_ref) {
  if (k_ref >= betas.kmax) {
    throw DomainError("k_ref=" + std::to_string(k_ref) + " must be < K_max=" +
                      std::to_string(betas.kmax));
  }
  PersistenceRatios out;
  out.grid = betas.grid;
  out.k_ref = k_ref;
  const auto g = static_cast<Eigen::Index>(betas.grid.size());
  out.ratio = RowMatrix::Zero(g, betas.scales);
  out.defined.assign(betas.grid.size(), false);
  for (Eigen::Index i = 0; i < g; ++i) {
    double total = 0.0;
    for (int j = 1; j <= betas.scales; ++j) {
      total += std::abs(betas.at(static_cast<std::size_t>(i), j, k_ref));
    }
    if (!(total > 0.0)) {
      out.ratio.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    out.defined[static_cast<std::size_t>(i)] = true;
    for (int j = 1; j <= betas.scales; ++j) {
      out.ratio(i, j - 1) = std::abs(betas.at(static_cast<std::size_t>(i), j, k_ref)) / total;
    }
  }
  return out;
}

std::map<std::string, std::vector<double>> average_ratios(const PersistenceRatios& ratios,
                                                          std::span<const std::string> keys) {
  if (keys.size() != ratios.grid.size()) {
    throw DomainError("average_ratios: one key per grid point required");
  }
  const auto j = static_cast<std::size_t>(ratios.ratio.cols());
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> acc;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!ratios.defined[i]) continue;
    auto& [sum, n] = acc[keys[i]];
    sum.resize(j, 0.0);
    for (std::size_t c = 0; c < j; ++c) sum[c] += ratios.ratio(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    ++n;
  }
  std::map<std::string, std::vector<double>> out;
  for (auto& [k, v] : acc) {
    for (auto& x : v.first) x /= static_cast<double>(v.second);
    out.emplace(k, std::move(v.first));
  }
  return out;
}

AlignedSeries ScaleDecomposition::reconstruction() const {
  AlignedSeries out = residual.series;
  for (const auto& c : components) {
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += c.values[i];
  }
  return out;
}

ScaleDecomposition decompose(const MaRepresentation& ma, const AlignedSeries& innovations,
                             std::size_t length, int scales, std::size_t kmax, bool parallel) {
  ScaleDecomposition dec;
  dec.betas = scale_betas(ma, scales, kmax, parallel);
  dec.detail_shocks = haar_detail_shocks(innovations, scales, parallel);
  dec.components = scale_components(dec.betas, dec.detail_shocks, length, parallel);
  dec.residual = residual_component(ma, scales, kmax, innovations, length);
  return dec;
}

}  // namespace tvewd
