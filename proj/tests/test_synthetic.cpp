#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tvewd/error.hpp"
#include "tvewd/synthetic.hpp"

using namespace tvewd;

namespace {

double lag1_corr(std::span<const double> x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    den += (x[t] - m) * (x[t] - m);
    if (t > 0) num += (x[t] - m) * (x[t - 1] - m);
  }
  return num / den;
}

}  // namespace

TEST_CASE("zero coefficients give intercept plus innovations") {
  TvArDgp d;
  d.phi = {[](double) { return 0.0; }};
  d.intercept = [](double) { return 3.0; };
  const auto s = simulate(d, 200, 9);
  for (std::size_t t = 0; t < 200; ++t) CHECK(s.series[t] == doctest::Approx(3.0 + s.innovations[t]));
}

TEST_CASE("fixed seed reproduces bit for bit; streams differ") {
  const auto a = simulate(dgp_b(), 300, 42, 7);
  const auto b = simulate(dgp_b(), 300, 42, 7);
  const auto c = simulate(dgp_b(), 300, 42, 8);
  for (std::size_t t = 0; t < 300; ++t) CHECK(a.series[t] == b.series[t]);
  CHECK(a.series[0] != c.series[0]);
}

TEST_CASE("persistence rises along dgp a") {
  const auto s = simulate(dgp_a(), 2000, 1);
  const auto v = s.series.values();
  CHECK(lag1_corr(v.last(500)) > lag1_corr(v.first(500)));
}

TEST_CASE("unstable curves are rejected") {
  TvArDgp d;
  d.phi = {[](double u) { return 0.5 + u; }};
  CHECK_THROWS_AS(simulate(d, 200, 1), DomainError);
  CHECK_THROWS_AS(simulate(dgp_a(), 50, 1), DomainError);
  CHECK_NOTHROW(dgp_b().validate());
  CHECK_NOTHROW(dgp_c_log().validate());
}

TEST_CASE("constant curves match stationary AR moments") {
  TvArDgp d;
  d.phi = {[](double) { return 0.5; }};
  const auto s = simulate(d, 100000, 3);
  const auto v = s.series.values();
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  var /= v.size();
  // stationary variance 1 / (1 - 0.25); MC sd of the estimate is about 0.008
  CHECK(std::abs(var - 4.0 / 3.0) < 0.04);
  CHECK(std::abs(lag1_corr(v) - 0.5) < 0.01);
}

TEST_CASE("student-t innovations have unit variance") {
  auto rng = make_rng(5);
  double ss = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double e = draw_innovation(InnovationLaw::student_t, 5.0, rng);
    ss += e * e;
  }
  CHECK(std::abs(ss / n - 1.0) < 0.05);
}

TEST_CASE("named generators") {
  const auto c = simulate_named("c", 500, 1);
  for (double x : c.series.values()) CHECK(x > 0.0);
  CHECK_THROWS_AS(simulate_named("z", 500, 1), DomainError);
}

TEST_CASE("oracle forecasts") {
  const std::vector<double> beta{0.5, -0.2, 0.1};
  std::vector<double> e(40);
  for (std::size_t t = 0; t < e.size(); ++t) e[t] = std::sin(0.7 * t);
  auto rng = make_rng(1);
  // zero-variance continuation: the mean is the deterministic value
  const auto z = oracle::scale_forecast(beta, e, 2, 3, 1, 0.0, InnovationLaw::normal, rng);
  CHECK(z.std_error == 0.0);
  // beyond all memory the forecast is pure noise with mean zero
  const auto far = oracle::scale_forecast(beta, e, 2, 20, 20000, 1.0, InnovationLaw::normal, rng);
  CHECK(std::abs(far.mean) < 4 * far.std_error);
  const std::vector<double> alpha{1.0, 0.5, 0.25};
  const auto ma = oracle::ma_forecast(alpha, e, 1, 1, 0.0, InnovationLaw::normal, rng);
  CHECK(ma.mean == doctest::Approx(0.5 * e[39] + 0.25 * e[38]));
}
