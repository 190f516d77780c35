#include "tvewd/synthetic.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "tvewd/error.hpp"

namespace tvewd::oracle {

std::vector<double> ma_by_companion(std::span<const double> phi, std::size_t truncation) {
  const auto p = static_cast<Eigen::Index>(phi.size());
  std::vector<double> alpha(truncation, 0.0);
  if (truncation == 0) return alpha;
  if (p == 0) {
    alpha[0] = 1.0;
    return alpha;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) a(0, i) = phi[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < p; ++i) a(i, i - 1) = 1.0;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p, p);
  for (std::size_t h = 0; h < truncation; ++h) {
    alpha[h] = power(0, 0);
    power = a * power;
  }
  return alpha;
}

std::vector<std::vector<double>> ewd_betas(std::span<const double> alpha, int scales,
                                           std::size_t kmax) {
  std::vector<std::vector<double>> beta(static_cast<std::size_t>(scales));
  for (int j = 1; j <= scales; ++j) {
    const std::size_t width = std::size_t{1} << j;
    const std::size_t count = kmax << (scales - j);
    auto& b = beta[static_cast<std::size_t>(j - 1)];
    b.assign(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < width; ++i) {
        const std::size_t lag = k * width + i;
        const double a = lag < alpha.size() ? alpha[lag] : 0.0;
        sum += (2 * i < width ? a : -a);
      }
      b[k] = sum / std::pow(2.0, j / 2.0);
    }
  }
  return beta;
}

namespace {

double detail_shock(const std::vector<double>& e, std::size_t t, int j) {
  const std::size_t width = std::size_t{1} << j;
  double sum = 0.0;
  for (std::size_t i = 0; i < width; ++i) sum += (2 * i < width ? e[t - i] : -e[t - i]);
  return sum / std::pow(2.0, j / 2.0);
}

McEstimate summarize(double sum, double sum_sq, std::size_t paths) {
  McEstimate out;
  out.paths = paths;
  const double n = static_cast<double>(paths);
  out.mean = sum / n;
  const double var = paths > 1 ? std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0)) : 0.0;
  out.std_error = std::sqrt(var / n);
  return out;
}

}  // namespace

McEstimate scale_forecast(std::span<const double> beta_j, std::span<const double> innovations,
                          int j, int h, std::size_t paths, double sigma, InnovationLaw law,
                          std::mt19937_64& rng) {
  if (paths == 0) throw DomainError("oracle needs at least one path");
  const std::size_t width = std::size_t{1} << j;
  const std::size_t n = innovations.size();
  const std::size_t target = n - 1 + static_cast<std::size_t>(h);
  if (beta_j.size() * width + width > target + 1) {
    throw DomainError("oracle: realized innovations too short for the lag window");
  }
  std::vector<double> e(innovations.begin(), innovations.end());
  e.resize(n + static_cast<std::size_t>(h));
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t path = 0; path < paths; ++path) {
    for (std::size_t t = n; t < e.size(); ++t) e[t] = sigma * draw_innovation(law, 5.0, rng);
    double x = 0.0;
    for (std::size_t k = 0; k < beta_j.size(); ++k) {
      x += beta_j[k] * detail_shock(e, target - k * width, j);
    }
    sum += x;
    sum_sq += x * x;
  }
  return summarize(sum, sum_sq, paths);
}

McEstimate ma_forecast(std::span<const double> alpha, std::span<const double> innovations, int h,
                       std::size_t paths, double sigma, InnovationLaw law, std::mt19937_64& rng) {
  if (paths == 0) throw DomainError("oracle needs at least one path");
  const std::size_t n = innovations.size();
  std::vector<double> e(innovations.begin(), innovations.end());
  e.resize(n + static_cast<std::size_t>(h));
  const std::size_t target = n - 1 + static_cast<std::size_t>(h);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t path = 0; path < paths; ++path) {
    for (std::size_t t = n; t < e.size(); ++t) e[t] = sigma * draw_innovation(law, 5.0, rng);
    double x = 0.0;
    for (std::size_t i = 0; i < alpha.size() && i <= target; ++i) x += alpha[i] * e[target - i];
    sum += x;
    sum_sq += x * x;
  }
  return summarize(sum, sum_sq, paths);
}

}  // namespace tvewd::oracle
