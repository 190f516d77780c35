#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "tvewd/error.hpp"
#include "tvewd/series.hpp"

using namespace tvewd;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST_CASE("rescaled time maps positions onto (0,1]") {
  CHECK(rescaled_time(0, 4) == doctest::Approx(0.25));
  CHECK(rescaled_time(3, 4) == 1.0);
  const auto grid = observation_grid(5);
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == doctest::Approx(0.2));
  CHECK(grid.back() == 1.0);
  CHECK_THROWS_AS(RescaledTime(1.5), DomainError);
  CHECK_THROWS_AS(RescaledTime(-0.1), DomainError);
  CHECK(RescaledTime(0.0).value() == 0.0);
}

TEST_CASE("TimeSeries invariants") {
  CHECK_THROWS_AS(TimeSeries({1.0}), DomainError);
  CHECK_THROWS_AS(TimeSeries({1.0, NAN}), DomainError);
  CHECK_THROWS_AS(TimeSeries({1.0, 2.0}, {"2020-02", "2020-01"}), DomainError);
  CHECK_THROWS_AS(TimeSeries({1.0, 2.0}, {"2020-01"}), DomainError);

  TimeSeries s({1.0, 2.0, 3.0}, {"2020-01", "2020-02", "2020-03"}, "M");
  CHECK(s.size() == 3);
  CHECK(s.label(1) == "2020-02");
  CHECK(s.frequency() == "M");
  TimeSeries u({4.0, 5.0});
  CHECK(u.label(1) == "1");
}

TEST_CASE("split keeps the first m observations in sample") {
  TimeSeries s({1, 2, 3, 4, 5});
  auto [in, out] = split(s, 4);
  CHECK(in.size() == 4);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == 5.0);
  CHECK_THROWS_AS(split(s, 5), DomainError);
  CHECK_THROWS_AS(split(s, 0), DomainError);
  const auto sp = make_split(10, 7);
  CHECK(sp.in_sample == 7);
  CHECK(sp.out_sample == 3);
}

TEST_CASE("log differences of a positive series") {
  TimeSeries s({100.0, 110.0, 99.0}, {"2020-01", "2020-02", "2020-03"});
  const auto d = log_difference(s);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == doctest::Approx(std::log(1.1)));
  CHECK(d.label(0) == "2020-02");
  CHECK_THROWS_AS(log_difference(TimeSeries({1.0, 0.0, 2.0})), DomainError);
}

TEST_CASE("panel CSV with unequal lengths") {
  const auto path = write_temp("tvewd_panel.csv",
                               "date,A,B\n2020-01-01,1.0,\n2020-01-02,2.0,5.0\n"
                               "2020-01-03,3.0,6.0\n2020-01-06,4.0,7.0\n");
  const auto panel = read_panel_csv(path, "D");
  REQUIRE(panel.size() == 2);
  CHECK(panel.at("A").size() == 4);
  CHECK(panel.at("B").size() == 3);
  CHECK(panel.at("B").label(0) == "2020-01-02");
  CHECK_THROWS(panel.at("C"));
}

TEST_CASE("CSV rejects interior gaps and unsorted dates") {
  const auto gap = write_temp("tvewd_gap.csv", "date,A\n2020-01,1\n2020-02,\n2020-03,3\n");
  CHECK_THROWS_AS(read_series_csv(gap), DomainError);
  const auto order = write_temp("tvewd_order.csv", "date,A\n2020-02,1\n2020-01,2\n2020-03,3\n");
  CHECK_THROWS_AS(read_series_csv(order), DomainError);
  const auto bad = write_temp("tvewd_bad.csv", "date,A\n2020-01,1\n2020-02,x\n");
  CHECK_THROWS_AS(read_series_csv(bad), DomainError);
}

TEST_CASE("CSV round trip") {
  TimeSeries s({1.5, -2.25, 3.125}, {"2021-01", "2021-02", "2021-03"});
  const auto path = (std::filesystem::temp_directory_path() / "tvewd_rt.csv").string();
  write_series_csv(path, s, "x");
  const auto back = read_series_csv(path, "x");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == s[i]);
  CHECK(back.label(2) == "2021-03");

  TimeSeries plain({1.0, 2.0, 3.0});
  write_series_csv(path, plain);
  const auto p = read_series_csv(path);
  CHECK(p.size() == 3);
  CHECK_FALSE(p.has_labels());
}

TEST_CASE("aligned series positions") {
  AlignedSeries a{3, {1.0, 2.0}};
  CHECK(a.end() == 5);
  CHECK_FALSE(a.available(2));
  CHECK(a.available(4));
  CHECK(a[4] == 2.0);
}
