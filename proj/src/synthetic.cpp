#include "tvewd/synthetic.hpp"

#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "tvewd/error.hpp"

namespace tvewd {

namespace {

double logistic(double u, double centre, double speed) {
  return 1.0 / (1.0 + std::exp(-speed * (u - centre)));
}

double companion_radius(const std::vector<double>& phi) {
  const auto p = static_cast<Eigen::Index>(phi.size());
  if (p == 0) return 0.0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) a(0, i) = phi[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < p; ++i) a(i, i - 1) = 1.0;
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<double> TvArDgp::coefficients_at(double u) const {
  std::vector<double> out;
  out.reserve(phi.size());
  for (const auto& f : phi) out.push_back(f(u));
  return out;
}

void TvArDgp::validate(std::size_t points) const {
  if (points < 2) throw DomainError("validation grid needs at least two points");
  if (!(sigma >= 0.0)) throw DomainError("innovation scale must be non-negative");
  if (law == InnovationLaw::student_t && !(student_df > 2.0)) {
    throw DomainError("student-t innovations need df > 2");
  }
  for (std::size_t g = 0; g < points; ++g) {
    const double u = static_cast<double>(g) / static_cast<double>(points - 1);
    const auto c = coefficients_at(u);
    for (double v : c) {
      if (!std::isfinite(v)) throw DomainError(name + ": non-finite coefficient at u=" + std::to_string(u));
    }
    if (!std::isfinite(intercept(u))) throw DomainError(name + ": non-finite intercept");
    const double r = companion_radius(c);
    if (!(r < 1.0)) {
      throw DomainError(name + ": local AR polynomial unstable at u=" + std::to_string(u) +
                        " (root modulus " + std::to_string(1.0 / r) + ")");
    }
  }
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x7465u};
  return std::mt19937_64(seq);
}

double draw_innovation(InnovationLaw law, double df, std::mt19937_64& rng) {
  if (law == InnovationLaw::student_t) {
    std::student_t_distribution<double> t(df);
    return t(rng) * std::sqrt((df - 2.0) / df);
  }
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

Simulation simulate(const TvArDgp& dgp, std::size_t length, std::uint64_t seed,
                    std::uint64_t stream) {
  if (length < 100) throw DomainError("simulation length must be >= 100");
  dgp.validate();
  auto rng = make_rng(seed, stream);
  const std::size_t p = dgp.phi.size();
  const std::size_t total = kBurnIn + length;
  std::vector<double> x(total, 0.0), e(total, 0.0);
  const auto phi_start = dgp.coefficients_at(0.0);
  const double c_start = dgp.intercept(0.0);
  for (std::size_t t = 0; t < total; ++t) {
    const bool burn = t < kBurnIn;
    const double u = burn ? 0.0 : rescaled_time(t - kBurnIn, length);
    const std::vector<double> phi = burn ? phi_start : dgp.coefficients_at(u);
    e[t] = dgp.sigma * draw_innovation(dgp.law, dgp.student_df, rng);
    double v = (burn ? c_start : dgp.intercept(u)) + e[t];
    for (std::size_t i = 1; i <= p && i <= t; ++i) v += phi[i - 1] * x[t - i];
    x[t] = v;
  }
  Simulation out;
  out.series = TimeSeries(std::vector<double>(x.begin() + kBurnIn, x.end()));
  out.innovations.assign(e.begin() + kBurnIn, e.end());
  return out;
}

TvArDgp dgp_a() {
  TvArDgp d;
  d.name = "a";
  d.phi = {[](double u) { return 0.2 + 0.6 * u; }};
  return d;
}

TvArDgp dgp_b() {
  TvArDgp d;
  d.name = "b";
  d.phi = {[](double u) { return 0.2 + 0.4 * logistic(u, 0.4, 25.0); },
           [](double u) { return -0.2 + 0.4 * logistic(u, 0.4, 25.0); }};
  return d;
}

TvArDgp dgp_c_log() {
  TvArDgp d;
  d.name = "c";
  d.sigma = 0.3;
  const auto daily = [](double u) { return 0.5 - 0.25 * u; };
  const auto weekly = [](double) { return 0.3; };
  const auto monthly = [](double u) { return 0.12 + 0.25 * u; };
  for (int i = 1; i <= 22; ++i) {
    d.phi.push_back([=](double u) {
      double v = monthly(u) / 22.0;
      if (i <= 5) v += weekly(u) / 5.0;
      if (i == 1) v += daily(u);
      return v;
    });
  }
  // Unconditional log level near -1 everywhere on the path (coefficients sum to 0.92).
  d.intercept = [](double) { return -0.08; };
  return d;
}

Simulation simulate_named(const std::string& name, std::size_t length, std::uint64_t seed,
                          std::uint64_t stream) {
  if (name == "a") return simulate(dgp_a(), length, seed, stream);
  if (name == "b") return simulate(dgp_b(), length, seed, stream);
  if (name == "c") {
    Simulation s = simulate(dgp_c_log(), length, seed, stream);
    std::vector<double> v(s.series.values().begin(), s.series.values().end());
    for (double& x : v) x = std::exp(x);
    s.series = TimeSeries(std::move(v));
    return s;
  }
  throw DomainError("unknown generator '" + name + "' (expected a, b or c)");
}

}  // namespace tvewd
