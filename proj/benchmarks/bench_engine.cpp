#include <benchmark/benchmark.h>

#include "dgcm/engine.hpp"
#include "dgcm/rng.hpp"
#include "dgcm/simulation.hpp"

namespace {

using namespace dgcm;

CovariancePath bench_path(int count, int width) {
    SplitRng rng(31337);
    CovariancePath path;
    path.lag_window = 1;
    path.t_first = 1;
    path.t_last = count;
    path.generators.resize(count, width);
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < width; ++j) path.generators(i, j) = rng.next_normal();
    }
    return path;
}

void BM_Statistic(benchmark::State& state) {
    const auto path = bench_path(static_cast<int>(state.range(0)),
                                 static_cast<int>(state.range(1)));
    SplitRng rng(1);
    const Eigen::MatrixXd values = simulate_gaussian_path(path, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(statistic(values, {}));
    }
}
BENCHMARK(BM_Statistic)->Args({1000, 1})->Args({1000, 4});

void BM_Calibrate(benchmark::State& state) {
    const auto path = bench_path(static_cast<int>(state.range(0)), 1);
    const int sims = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(calibrate(path, {}, sims, 0.05, SplitRng(7), 1));
    }
}
BENCHMARK(BM_Calibrate)->Args({500, 2000})->Args({1000, 5000});

void BM_FullConditionalTest(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SplitRng rng(99);
    const auto panel = generate({DgpFamily::correlated_shocks, 1, 0.0}, n, rng);
    const auto spec = dgp_hypothesis(DgpFamily::correlated_shocks);
    SieveStrategy sieve;
    LagWindowStrategy lag;
    TestConfig config;
    config.sims = 2000;
    config.seed = 5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_dgcm(panel, spec, sieve, lag, config));
    }
}
BENCHMARK(BM_FullConditionalTest)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
