#include <doctest.h>

#include <cmath>
#include <random>

#include "tvewd/error.hpp"
#include "tvewd/ewd.hpp"
#include "tvewd/reference.hpp"
#include "tvewd/synthetic.hpp"

using namespace tvewd;

namespace {

MaRepresentation single_point(const std::vector<double>& alpha) {
  RowMatrix a(1, static_cast<Eigen::Index>(alpha.size()));
  for (std::size_t h = 0; h < alpha.size(); ++h) a(0, static_cast<Eigen::Index>(h)) = alpha[h];
  return MaRepresentation::from_alpha({1.0}, a);
}

AlignedSeries noise(std::size_t n, std::uint64_t seed, std::size_t first = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  AlignedSeries e;
  e.first = first;
  e.values.resize(n);
  for (auto& v : e.values) v = n01(rng);
  return e;
}

}  // namespace

TEST_CASE("white noise betas") {
  std::vector<double> alpha(64, 0.0);
  alpha[0] = 1.0;
  const auto b = scale_betas(single_point(alpha), 4, 2);
  for (int j = 1; j <= 4; ++j) {
    CHECK(b.shifts(j) == (2u << (4 - j)));
    CHECK(b.at(0, j, 0) == doctest::Approx(std::pow(2.0, -j / 2.0)));
    for (std::size_t k = 1; k < b.shifts(j); ++k) CHECK(b.at(0, j, k) == 0.0);
  }
}

TEST_CASE("AR(1) closed form at the finest scale") {
  const double phi = 0.6;
  std::vector<double> alpha(128);
  for (std::size_t h = 0; h < alpha.size(); ++h) alpha[h] = std::pow(phi, h);
  const auto b = scale_betas(single_point(alpha), 3, 4);
  for (std::size_t k = 0; k < b.shifts(1); ++k) {
    CHECK(b.at(0, 1, k) == doctest::Approx((1 - phi) * std::pow(phi, 2.0 * k) / std::sqrt(2.0)));
  }
}

TEST_CASE("pyramid betas match literal sums") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  RowMatrix a(3, 256);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n01(rng);
  const auto ma = MaRepresentation::from_alpha({0.2, 0.6, 1.0}, a);
  const auto fast = scale_betas(ma, 5, 8, true);
  const auto slow = reference::scale_betas(ma, 5, 8);
  for (int j = 1; j <= 5; ++j) {
    CHECK((fast.beta[j - 1] - slow.beta[j - 1]).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(scale_betas(ma, 5, 9), DomainError);
}

TEST_CASE("detail shocks: prefix sums versus literal") {
  const auto e = noise(500, 3, 2);
  const auto fast = haar_detail_shocks(e, 5);
  const auto slow = reference::haar_detail_shocks(e, 5);
  for (int j = 1; j <= 5; ++j) {
    const auto& f = fast[j - 1];
    const auto& s = slow[j - 1];
    CHECK(f.first == e.first + (1u << j) - 1);
    REQUIRE(f.size() == s.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f.values[i] - s.values[i]) < 1e-12);
  }
}

TEST_CASE("components match the reference and reconstruct a finite MA") {
  const std::size_t n = 800;
  const int J = 3;
  const std::size_t kmax = 4;
  // support 20 < kmax 2^J = 32
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  RowMatrix a = RowMatrix::Zero(static_cast<Eigen::Index>(n), 64);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double u = rescaled_time(static_cast<std::size_t>(i), n);
    for (Eigen::Index h = 0; h < 20; ++h) a(i, h) = std::cos(0.3 * h + u) * std::pow(0.8, h);
  }
  const auto ma = MaRepresentation::from_alpha(observation_grid(n), a);
  const auto e = noise(n, 4);
  std::vector<double> x(n, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t h = 0; h < 20 && h <= t; ++h) x[t] += a(static_cast<Eigen::Index>(t), h) * e.values[t - h];

  const auto dec = decompose(ma, e, n, J, kmax, true);
  const auto rec = dec.reconstruction();
  CHECK(rec.first == kmax * (1u << J) - 1);
  double worst = 0.0;
  for (std::size_t t = rec.first; t < rec.end(); ++t) worst = std::max(worst, std::abs(rec[t] - x[t]));
  CHECK(worst < 1e-10);

  const auto ref = reference::scale_components(dec.betas, dec.detail_shocks, n);
  for (int j = 1; j <= J; ++j) {
    const auto& c = dec.components[j - 1];
    REQUIRE(c.first == ref[j - 1].first);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c.values[i] - ref[j - 1].values[i]) < 1e-12);
  }
}

TEST_CASE("persistence ratios sum to one") {
  std::vector<double> alpha(128);
  for (std::size_t h = 0; h < alpha.size(); ++h) alpha[h] = std::pow(0.8, h);
  const auto b = scale_betas(single_point(alpha), 4, 4);
  const auto r = persistence_ratios(b, 1);
  REQUIRE(r.defined[0]);
  CHECK(r.ratio.row(0).sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(persistence_ratios(b, 4), DomainError);

  std::vector<double> wn(128, 0.0);
  wn[0] = 1.0;
  const auto rw = persistence_ratios(scale_betas(single_point(wn), 4, 4), 1);
  CHECK_FALSE(rw.defined[0]);
  CHECK(std::isnan(rw.ratio(0, 0)));
}

TEST_CASE("ratio averaging by key") {
  PersistenceRatios r;
  r.grid = {0.25, 0.5, 0.75, 1.0};
  r.ratio.resize(4, 2);
  r.ratio << 0.2, 0.8, 0.4, 0.6, 0.5, 0.5, NAN, NAN;
  r.defined = {true, true, true, false};
  const std::vector<std::string> keys{"2000", "2000", "2001", "2001"};
  const auto avg = average_ratios(r, keys);
  CHECK(avg.at("2000")[0] == doctest::Approx(0.3));
  CHECK(avg.at("2001")[1] == doctest::Approx(0.5));
}
