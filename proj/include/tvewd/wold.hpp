#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tvewd/linalg.hpp"

namespace tvewd {

struct TvArFit;

/// Time-varying Wold coefficients alpha(u, h), h = 0..N-1, on a grid.
struct MaRepresentation {
  std::vector<double> grid;
  RowMatrix alpha;  // grid x N
  std::vector<bool> stationary;      // local AR roots outside the unit circle
  std::vector<bool> tail_converged;  // |alpha(u, N-1)| <= tail_tol
  std::vector<bool> clamped;         // explosive point, recursion cut at detection lag
  double tail_tol = 1e-6;

  std::size_t truncation() const noexcept { return static_cast<std::size_t>(alpha.cols()); }
  std::size_t points() const noexcept { return grid.size(); }

  /// Wrap known coefficients (alpha(u,0) need not be 1 for synthetic truths).
  static MaRepresentation from_alpha(std::vector<double> grid, RowMatrix alpha,
                                     double tail_tol = 1e-6);
};

struct MaOptions {
  std::size_t truncation = 1024;
  double tail_tol = 1e-6;
  bool allow_nonstationary = false;
  bool parallel = true;
};

/// Default truncation 2^J * 32.
std::size_t default_truncation(int scales);

/// Magnitude of the largest root of z^p - phi_1 z^{p-1} - ... - phi_p
/// (spectral radius of the companion matrix).
double ar_spectral_radius(std::span<const double> phi);

/// Frozen-coefficient MA(inf) weights of a single AR(p): alpha_0 = 1,
/// alpha_h = sum_{i<=min(h,p)} phi_i alpha_{h-i}.
std::vector<double> ar_to_ma(std::span<const double> phi, std::size_t truncation);

/// Inversion at every grid point of the fit.
MaRepresentation ar_to_ma(const TvArFit& fit, const MaOptions& options);

}  // namespace tvewd
