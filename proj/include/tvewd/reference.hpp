#pragma once

// Serial reference kernels. They follow the defining formulas term by term
// (full kernel sums, literal Haar sums) and exist to check the windowed,
// prefix-sum and OpenMP paths in the production modules.

#include <cstddef>
#include <span>
#include <vector>

#include "tvewd/ewd.hpp"
#include "tvewd/local_linear.hpp"
#include "tvewd/wold.hpp"

namespace tvewd::reference {

/// Local linear fit summing over every row, unscaled normal equations.
LocalEstimate local_linear_fit(const LocalLinearRegression& reg, double u, const Kernel& kernel,
                               double b);

std::vector<LocalEstimate> fit_on_grid(const LocalLinearRegression& reg,
                                       std::span<const double> grid, const Kernel& kernel,
                                       double b);

MaRepresentation ar_to_ma(const TvArFit& fit, std::size_t truncation);

ScaleBetas scale_betas(const MaRepresentation& ma, int scales, std::size_t kmax);

std::vector<AlignedSeries> haar_detail_shocks(const AlignedSeries& innovations, int scales);

std::vector<AlignedSeries> scale_components(const ScaleBetas& betas,
                                            const std::vector<AlignedSeries>& shocks,
                                            std::size_t length);

}  // namespace tvewd::reference
