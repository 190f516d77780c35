#pragma once

// Locally stationary generators with known truth, plus brute-force oracles
// for the property tests. Nothing here is used by the estimation path.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tvewd/series.hpp"

namespace tvewd {

using Curve = std::function<double(double)>;

enum class InnovationLaw { normal, student_t };

struct TvArDgp {
  std::string name;
  Curve intercept = [](double) { return 0.0; };
  std::vector<Curve> phi;  // phi_1(u)..phi_p(u)
  InnovationLaw law = InnovationLaw::normal;
  double sigma = 1.0;
  double student_df = 5.0;  // t innovations are rescaled to unit variance

  int order() const noexcept { return static_cast<int>(phi.size()); }
  std::vector<double> coefficients_at(double u) const;
  /// Throws DomainError unless the local AR polynomial is stable on `points`
  /// evenly spaced values of u in [0,1].
  void validate(std::size_t points = 201) const;
};

/// Independent engine for replication `stream` of a seeded experiment.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Unit-variance draw from the law (times sigma is applied by the caller).
double draw_innovation(InnovationLaw law, double df, std::mt19937_64& rng);

struct Simulation {
  TimeSeries series;
  std::vector<double> innovations;  // sigma * eps_t at positions 0..T-1
};

inline constexpr std::size_t kBurnIn = 200;

/// x_t = phi0(t/T) + sum_i phi_i(t/T) x_{t-i} + sigma eps_t, after a burn-in
/// of kBurnIn draws at the u = 0 coefficients.
Simulation simulate(const TvArDgp& dgp, std::size_t length, std::uint64_t seed,
                    std::uint64_t stream = 0);

/// AR(1) with phi_1(u) = 0.2 + 0.6 u.
TvArDgp dgp_a();
/// AR(2) whose coefficients move along a logistic path from (0.2, -0.2) to
/// (0.6, 0.2), centred at u = 0.4: short-lived dynamics early, slow decay late.
TvArDgp dgp_b();
/// Log-volatility HAR with daily weight fading into the monthly one.
TvArDgp dgp_c_log();

/// Named generator: "a", "b", or "c" (exponentiated log HAR, positive).
Simulation simulate_named(const std::string& name, std::size_t length, std::uint64_t seed,
                          std::uint64_t stream = 0);

namespace oracle {

/// alpha_h = e1' A^h e1 with A the companion matrix of phi.
std::vector<double> ma_by_companion(std::span<const double> phi, std::size_t truncation);

/// beta[j-1][k] by term-by-term summation of the Haar filter applied to alpha,
/// kmax * 2^(J-j) shifts at scale j.
std::vector<std::vector<double>> ewd_betas(std::span<const double> alpha, int scales,
                                           std::size_t kmax);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
};

/// Monte Carlo E[x^{j}_{T-1+h}] given realized innovations e_0..e_{T-1}:
/// each path appends h fresh draws (sigma times the law) and evaluates the
/// scale component literally.
McEstimate scale_forecast(std::span<const double> beta_j, std::span<const double> innovations,
                          int j, int h, std::size_t paths, double sigma, InnovationLaw law,
                          std::mt19937_64& rng);

/// Monte Carlo E[x_{T-1+h}] = E[sum_i alpha_i e_{T-1+h-i}] for a fixed MA.
McEstimate ma_forecast(std::span<const double> alpha, std::span<const double> innovations, int h,
                       std::size_t paths, double sigma, InnovationLaw law, std::mt19937_64& rng);

}  // namespace oracle

}  // namespace tvewd
