#include <benchmark/benchmark.h>

#include <numeric>

#include "dgcm/rng.hpp"
#include "dgcm/simulation.hpp"
#include "dgcm/sieve.hpp"

namespace {

using namespace dgcm;

TimeSeriesPanel bench_panel(int n) {
    SplitRng rng(12345);
    return generate({DgpFamily::correlated_shocks, 1, 0.3}, n, rng);
}

void BM_DesignMatrix(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto panel = bench_panel(n);
    std::vector<int> times(static_cast<std::size_t>(n));
    std::iota(times.begin(), times.end(), 1);
    SieveConfig config;
    config.time_count = 6;
    config.cov_count = 6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            build_design_matrix(panel, times, {{0, 0}}, config, TimeRemap{1, n}));
    }
}
BENCHMARK(BM_DesignMatrix)->Arg(500)->Arg(1000);

void BM_FitRegression(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto panel = bench_panel(n);
    const EffectiveTimeRange range{1, n, n};
    SieveConfig config;
    config.time_count = 6;
    config.cov_count = 6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fit_regression(panel, range, {SeriesRole::X, 0, 0}, {{0, 0}}, config));
    }
}
BENCHMARK(BM_FitRegression)->Arg(500)->Arg(1000);

}  // namespace
