#include <doctest.h>

#include <cmath>
#include <random>

#include "tvewd/benchmarks.hpp"
#include "tvewd/error.hpp"
#include "tvewd/synthetic.hpp"

using namespace tvewd;

namespace {

std::vector<double> ar_path(std::vector<double> phi, double c, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> x(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double v = c + n01(rng);
    for (std::size_t i = 1; i <= phi.size() && i <= t; ++i) v += phi[i - 1] * x[t - i];
    x[t] = v;
  }
  return x;
}

}  // namespace

TEST_CASE("AR fit recovers coefficients and iterates forecasts") {
  const auto x = ar_path({0.5, -0.2, 0.1}, 1.0, 20000, 1);
  const auto ar = fit_ar(x, 3);
  CHECK(ar.phi[0] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(ar.phi[1] == doctest::Approx(-0.2).epsilon(0.1));
  const double mean = ar.intercept / (1 - ar.phi[0] - ar.phi[1] - ar.phi[2]);
  CHECK(ar.forecast(x, 500) == doctest::Approx(mean).epsilon(1e-6));

  ArCoefficients a{0.0, {0.5}};
  const std::vector<double> h{4.0};
  CHECK(a.forecast(h, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_ar(std::vector<double>(10, 1.0), 3), DomainError);
}

TEST_CASE("constant series gives an intercept-only AR") {
  const std::vector<double> x(100, 3.0);
  const auto ar = fit_ar(x, 2);
  CHECK(ar.forecast(x, 3) == doctest::Approx(3.0));
}

TEST_CASE("HAR forecast updates rolling means") {
  HarCoefficients h{0.1, 0.4, 0.3, 0.2};
  std::vector<double> x(30, 1.0);
  CHECK(h.forecast(x, 1) == doctest::Approx(1.0));
  x.back() = 2.0;
  const double one = 0.1 + 0.4 * 2.0 + 0.3 * (6.0 / 5.0) + 0.2 * (23.0 / 22.0);
  CHECK(h.forecast(x, 1) == doctest::Approx(one));
  const auto fit = fit_har(ar_path({0.6}, 0.5, 3000, 2));
  CHECK(std::isfinite(fit.daily));
  CHECK_THROWS_AS(fit_har(std::vector<double>(40, 1.0)), DomainError);
}

TEST_CASE("TV-AR benchmark on stationary data approaches the OLS fit") {
  const auto x = ar_path({0.6}, 0.0, 4000, 3);
  const auto tv = fit_tv(x, TvKind::ar_p, 1, 1.0, Kernel(KernelType::uniform), {0.5});
  const auto ols = fit_ar(x, 1);
  CHECK(tv.boundary()(1) == doctest::Approx(ols.phi[0]).epsilon(0.02));
}

TEST_CASE("stationary EWD on white noise") {
  const auto x = ar_path({0.0}, 2.0, 3000, 4);
  StationaryEwd ewd(3, 1, 4);
  ewd.fit(x);
  CHECK(ewd.mean() == doctest::Approx(2.0).epsilon(0.05));
  CHECK(ewd.beta().size() == 3);
  CHECK(ewd.beta()[2].size() == 4);
  CHECK(ewd.beta()[0].size() == 16);
  CHECK(std::isfinite(ewd.forecast(x, 1)));
  StationaryEwd unit(3, 1, 4);
  std::vector<double> growth(300);
  for (std::size_t t = 0; t < growth.size(); ++t) growth[t] = std::pow(1.02, static_cast<double>(t));
  CHECK_THROWS_AS(unit.fit(growth), EstimationError);
}

TEST_CASE("model registry") {
  ModelSpec s;
  for (const char* name : {"ar3", "ar1", "har", "tvar3", "tvhar", "ewd", "tvewd"}) {
    s.name = name;
    CHECK(make_model(s, 1)->name() == name);
  }
  s.name = "arx";
  CHECK_THROWS_AS(make_model(s, 1), DomainError);
  CHECK(parse_model_list("ar3, har,tvewd").size() == 3);
  CHECK_THROWS_AS(parse_model_list("ar3,bogus"), DomainError);
}

TEST_CASE("recursive wrapper refits on the growing history") {
  const auto x = ar_path({0.5}, 0.0, 400, 5);
  ModelSpec s;
  s.name = "ar1";
  s.recursive = true;
  auto rec = make_model(s, 1);
  s.recursive = false;
  auto fixed = make_model(s, 1);
  rec->fit(std::span<const double>(x).first(300));
  fixed->fit(x);
  CHECK(rec->predict(x, 1) == doctest::Approx(fixed->predict(x, 1)));
}

TEST_CASE("per-horizon TV-EWD schedule") {
  TvEwdSchedule sch;
  sch.per_horizon = {{1, 5, 2}, {5, 5, 5}, {22, 7, 15}};
  CHECK(sch.for_horizon(22).scales == 7);
  CHECK(sch.for_horizon(22).lags == 15);
  CHECK(sch.for_horizon(3).lags == sch.base.lags);
}
