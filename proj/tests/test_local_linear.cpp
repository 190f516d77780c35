#include <doctest.h>

#include <cmath>
#include <random>

#include "tvewd/error.hpp"
#include "tvewd/local_linear.hpp"
#include "tvewd/reference.hpp"

using namespace tvewd;

namespace {

// x_t = (1 + 0.4 u) x_{t-1} - x_{t-2}: bounded oscillation, no noise.
std::vector<double> oscillator(std::size_t n) {
  std::vector<double> x(n);
  x[0] = 1.0;
  x[1] = 0.5;
  for (std::size_t t = 2; t < n; ++t) {
    const double u = rescaled_time(t, n);
    x[t] = (1.0 + 0.4 * u) * x[t - 1] - x[t - 2];
  }
  return x;
}

}  // namespace

TEST_CASE("local linear fit reproduces a linear trend exactly") {
  const std::size_t n = 400;
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) y[t] = 1.0 + 2.0 * rescaled_time(t, n);
  const auto trend = estimate_trend(y, Kernel(), Bandwidth(0.2), {{}, false});
  for (std::size_t i = 0; i < trend.grid.size(); ++i) {
    CHECK(trend.level[i] == doctest::Approx(1.0 + 2.0 * trend.grid[i]).epsilon(1e-12));
    CHECK(trend.slope[i] == doctest::Approx(2.0).epsilon(1e-9));
  }
  for (double c : trend.centered) CHECK(std::abs(c) < 1e-10);
}

TEST_CASE("TV-AR recovers linear coefficient curves from noiseless data") {
  const std::size_t n = 800;
  const auto x = oscillator(n);
  const auto fit = estimate_tvar(x, 2, Kernel(), Bandwidth(0.1), {make_grid(n, 21), false});
  double worst = 0.0;
  for (std::size_t i = 0; i < fit.grid.size(); ++i) {
    const double u = fit.grid[i];
    worst = std::max(worst, std::abs(fit.phi(i, 0) - (1.0 + 0.4 * u)));
    worst = std::max(worst, std::abs(fit.phi(i, 1) + 1.0));
  }
  CHECK(worst < 1e-8);
  for (double e : fit.innovations.values) CHECK(std::abs(e) < 1e-8);
}

TEST_CASE("windowed fit agrees with the full-sum reference") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  const std::size_t n = 300;
  std::vector<double> x(n);
  for (auto& v : x) v = n01(rng);
  const auto reg = ar_regression(x, 2, true);
  const auto grid = make_grid(n, 15);
  for (auto type : {KernelType::epanechnikov, KernelType::gaussian, KernelType::uniform}) {
    Kernel k(type);
    const auto fast = fit_on_grid(reg, grid, k, 0.2, SolveMode::strict, true);
    const auto slow = reference::fit_on_grid(reg, grid, k, 0.2);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK((fast[i].level - slow[i].level).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((fast[i].slope - slow[i].slope).cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("parallel and serial grids are identical") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  std::vector<double> x(500);
  for (auto& v : x) v = n01(rng);
  const auto a = estimate_tvar(x, 3, Kernel(), Bandwidth(0.15), {{}, true});
  const auto b = estimate_tvar(x, 3, Kernel(), Bandwidth(0.15), {{}, false});
  CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("narrow windows are widened and recorded") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  std::vector<double> x(120);
  for (auto& v : x) v = n01(rng);
  // T b = 6 rows at the boundary under Epanechnikov, fewer than 2q+2 with positive weight.
  const auto fit = estimate_tvar(x, 5, Kernel(), Bandwidth(0.05), {{}, false});
  CHECK_FALSE(fit.adjustments.empty());
  for (const auto& a : fit.adjustments) CHECK(a.used > a.requested);
}

TEST_CASE("preconditions") {
  std::vector<double> x(50, 1.0);
  CHECK_THROWS_AS(estimate_tvar(x, 5, Kernel(), Bandwidth(0.3)), DomainError);
  CHECK_THROWS_AS(estimate_tvar(x, 0, Kernel(), Bandwidth(0.3)), DomainError);
  CHECK_THROWS_AS(estimate_trend(x, Kernel(), Bandwidth(0.05)), DomainError);
}

TEST_CASE("constant series is rank deficient in the AR regression") {
  std::vector<double> x(200, 0.0);
  CHECK_THROWS_AS(estimate_tvar(x, 1, Kernel(), Bandwidth(0.3)), EstimationError);
}

TEST_CASE("cross-validation curve falls with the bandwidth on white noise on average") {
  const std::vector<double> cands{0.1, 0.3, 0.6};
  std::vector<double> mean(cands.size(), 0.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::mt19937_64 rng(100 + rep);
    std::normal_distribution<double> n01;
    std::vector<double> x(400);
    for (auto& v : x) v = n01(rng);
    const auto cv = cross_validate_bandwidth(x, 1, Kernel(), cands, false);
    CHECK(cv.failures.empty());
    for (std::size_t c = 0; c < cands.size(); ++c) mean[c] += cv.scores[c] / 20.0;
  }
  CHECK(mean[0] > mean[1]);
  CHECK(mean[1] > mean[2]);
}

TEST_CASE("cross-validation picks a narrow window for fast-moving coefficients") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n01;
  const std::size_t n = 2000;
  std::vector<double> x(n, 0.0);
  for (std::size_t t = 1; t < n; ++t) {
    const double u = rescaled_time(t, n);
    x[t] = 0.8 * std::sin(6.0 * 3.141592653589793 * u) * x[t - 1] + n01(rng);
  }
  const auto cv = cross_validate_bandwidth(x, 1, Kernel(), default_bandwidth_candidates(), true);
  CHECK(cv.selected.value() <= 0.15);
}

TEST_CASE("single candidate") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  std::vector<double> x(300);
  for (auto& v : x) v = n01(rng);
  const std::vector<double> one{0.3};
  CHECK(cross_validate_bandwidth(x, 1, Kernel(), one).selected.value() == 0.3);
}

TEST_CASE("interpolation is piecewise linear and flat beyond the ends") {
  const std::vector<double> g{0.25, 0.5, 1.0}, v{1.0, 2.0, 4.0};
  CHECK(interpolate(g, v, 0.1) == 1.0);
  CHECK(interpolate(g, v, 0.75) == doctest::Approx(3.0));
  CHECK(interpolate(g, v, 1.0) == 4.0);
}
