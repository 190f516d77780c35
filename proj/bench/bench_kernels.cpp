// Serial reference kernels against the windowed / prefix-sum / OpenMP paths.

#include <benchmark/benchmark.h>

#include <random>

#include "tvewd/ewd.hpp"
#include "tvewd/local_linear.hpp"
#include "tvewd/reference.hpp"
#include "tvewd/synthetic.hpp"
#include "tvewd/wold.hpp"

using namespace tvewd;

namespace {

std::vector<double> sample(std::size_t n) {
  const auto sim = simulate(dgp_b(), n, 1);
  return {sim.series.values().begin(), sim.series.values().end()};
}

MaRepresentation ma_for(std::size_t n, std::size_t trunc) {
  const auto x = sample(n);
  const auto fit = estimate_tvar(x, 2, Kernel(), Bandwidth(0.2));
  MaOptions o;
  o.truncation = trunc;
  return ar_to_ma(fit, o);
}

void BM_LocalLinear_Reference(benchmark::State& st) {
  const auto x = sample(static_cast<std::size_t>(st.range(0)));
  const auto reg = ar_regression(x, 2, false);
  const auto grid = make_grid(x.size());
  for (auto _ : st) benchmark::DoNotOptimize(reference::fit_on_grid(reg, grid, Kernel(), 0.2));
}

void BM_LocalLinear_Windowed(benchmark::State& st) {
  const auto x = sample(static_cast<std::size_t>(st.range(0)));
  const auto reg = ar_regression(x, 2, false);
  const auto grid = make_grid(x.size());
  const bool par = st.range(1) != 0;
  for (auto _ : st)
    benchmark::DoNotOptimize(fit_on_grid(reg, grid, Kernel(), 0.2, SolveMode::strict, par));
}

void BM_Betas_Reference(benchmark::State& st) {
  const auto ma = ma_for(static_cast<std::size_t>(st.range(0)), 1024);
  for (auto _ : st) benchmark::DoNotOptimize(reference::scale_betas(ma, 5, 32));
}

void BM_Betas_Pyramid(benchmark::State& st) {
  const auto ma = ma_for(static_cast<std::size_t>(st.range(0)), 1024);
  const bool par = st.range(1) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(scale_betas(ma, 5, 32, par));
}

void BM_Components_Reference(benchmark::State& st) {
  const std::size_t n = static_cast<std::size_t>(st.range(0));
  const auto ma = ma_for(n, 1024);
  AlignedSeries e{0, std::vector<double>(n, 0.5)};
  const auto betas = scale_betas(ma, 5, 8);
  const auto shocks = haar_detail_shocks(e, 5);
  for (auto _ : st) benchmark::DoNotOptimize(reference::scale_components(betas, shocks, n));
}

void BM_Components(benchmark::State& st) {
  const std::size_t n = static_cast<std::size_t>(st.range(0));
  const auto ma = ma_for(n, 1024);
  AlignedSeries e{0, std::vector<double>(n, 0.5)};
  const auto betas = scale_betas(ma, 5, 8);
  const auto shocks = haar_detail_shocks(e, 5);
  const bool par = st.range(1) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(scale_components(betas, shocks, n, par));
}

}  // namespace

BENCHMARK(BM_LocalLinear_Reference)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalLinear_Windowed)->Args({1000, 0})->Args({1000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Betas_Reference)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Betas_Pyramid)->Args({1000, 0})->Args({1000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Components_Reference)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Components)->Args({2000, 0})->Args({2000, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
