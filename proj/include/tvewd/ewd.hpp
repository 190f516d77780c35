#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tvewd/linalg.hpp"
#include "tvewd/series.hpp"
#include "tvewd/wold.hpp"

namespace tvewd {

/// Multiscale impulse responses beta^{j}(u, k) on the MA grid.
///
/// `kmax` is the number of shifts kept at the coarsest scale J. Scale j keeps
/// kmax * 2^(J-j) shifts, i.e. every shift whose Haar support lies inside the
/// lag window [0, kmax * 2^J). With that choice the J detail scales plus the
/// low-pass residual form a complete Haar basis of the window, which is what
/// makes the decomposition reconstruct the centered series exactly.
struct ScaleBetas {
  int scales = 0;
  std::size_t kmax = 0;
  std::vector<double> grid;
  std::vector<RowMatrix> beta;  // beta[j-1]: grid x shifts(j)

  std::size_t shifts(int j) const noexcept { return kmax << (scales - j); }
  std::size_t lag_window() const noexcept { return kmax << scales; }
  double at(std::size_t g, int j, std::size_t k) const {
    return beta[static_cast<std::size_t>(j - 1)](static_cast<Eigen::Index>(g),
                                                 static_cast<Eigen::Index>(k));
  }
};

/// floor(N / 2^J).
std::size_t default_kmax(std::size_t truncation, int scales);

/// Haar detail shocks e^{j}_t, j = 1..J (index j-1). Shock j starts at
/// innovations.first + 2^j - 1; earlier positions are unavailable.
std::vector<AlignedSeries> haar_detail_shocks(const AlignedSeries& innovations, int scales,
                                              bool parallel = true);

/// Low-pass aggregate 2^{-J/2} * sum_{i<2^J} e_{t-i}.
AlignedSeries lowpass_shocks(const AlignedSeries& innovations, int scales);

ScaleBetas scale_betas(const MaRepresentation& ma, int scales, std::size_t kmax,
                       bool parallel = true);

/// x^{j}_t = sum_k beta^{j}(t/T, k) e^{j}_{t - k 2^j}, beta taken at each
/// observation's own rescaled time. All components start at the same
/// position (innovations.first + kmax 2^J - 1) and end with the shocks.
std::vector<AlignedSeries> scale_components(const ScaleBetas& betas,
                                            const std::vector<AlignedSeries>& shocks,
                                            std::size_t length, bool parallel = true);

struct ResidualComponent {
  RowMatrix gamma;  // grid x kmax
  AlignedSeries lowpass;
  AlignedSeries series;
};

ResidualComponent residual_component(const MaRepresentation& ma, int scales, std::size_t kmax,
                                     const AlignedSeries& innovations, std::size_t length);

struct PersistenceRatios {
  std::vector<double> grid;
  RowMatrix ratio;            // grid x J, rows sum to one where defined
  std::vector<bool> defined;  // false where every |beta^{j}(u, k_ref)| is zero
  std::size_t k_ref = 1;
};

PersistenceRatios persistence_ratios(const ScaleBetas& betas, std::size_t k_ref = 1);

/// Mean of the defined ratio rows sharing a key (e.g. the calendar year).
std::map<std::string, std::vector<double>> average_ratios(const PersistenceRatios& ratios,
                                                          std::span<const std::string> keys);

struct ScaleDecomposition {
  ScaleBetas betas;
  std::vector<AlignedSeries> detail_shocks;
  std::vector<AlignedSeries> components;
  ResidualComponent residual;

  int scales() const noexcept { return betas.scales; }
  std::size_t kmax() const noexcept { return betas.kmax; }
  /// First position where every component and the residual exist.
  std::size_t first_supported() const noexcept { return residual.series.first; }
  /// sum_j x^{j}_t + pi^{J}_t on the supported range.
  AlignedSeries reconstruction() const;
};

ScaleDecomposition decompose(const MaRepresentation& ma, const AlignedSeries& innovations,
                             std::size_t length, int scales, std::size_t kmax,
                             bool parallel = true);

}  // namespace tvewd
