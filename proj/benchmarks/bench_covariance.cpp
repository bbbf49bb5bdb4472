#include <benchmark/benchmark.h>

#include "dgcm/covariance.hpp"
#include "dgcm/rng.hpp"

namespace {

using namespace dgcm;

ResidualProducts bench_products(int count, int width) {
    SplitRng rng(777);
    ResidualProducts products;
    products.range = EffectiveTimeRange{1, count, count};
    for (int m = 0; m < width; ++m) products.tuples.push_back({0, m, 0, 0});
    products.values.resize(count, width);
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < width; ++j) products.values(i, j) = rng.next_normal();
    }
    return products;
}

void BM_RollingPath(benchmark::State& state) {
    const auto products = bench_products(static_cast<int>(state.range(0)), 1);
    const int lag = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rolling_path(products, lag));
    }
}
BENCHMARK(BM_RollingPath)->Args({1000, 22})->Args({1000, 100});

void BM_SelectLagWindow(benchmark::State& state) {
    const int count = static_cast<int>(state.range(0));
    const auto products = bench_products(count, static_cast<int>(state.range(1)));
    const auto candidates = default_lag_window_candidates(count, count);
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_lag_window(products, candidates, 12));
    }
}
BENCHMARK(BM_SelectLagWindow)->Args({500, 1})->Args({1000, 1})->Args({500, 3});

}  // namespace
