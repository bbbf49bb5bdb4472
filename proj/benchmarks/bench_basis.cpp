#include <benchmark/benchmark.h>

#include "dgcm/basis.hpp"

namespace {

void BM_TimeBasis(benchmark::State& state) {
    const int count = static_cast<int>(state.range(0));
    double u = 0.0;
    for (auto _ : state) {
        u += 1e-6;
        if (u > 1.0) u = 0.0;
        benchmark::DoNotOptimize(dgcm::eval_time_basis(u, count));
    }
}
BENCHMARK(BM_TimeBasis)->Arg(4)->Arg(10);

void BM_CovariateBasis(benchmark::State& state) {
    const int count = static_cast<int>(state.range(0));
    double z = -5.0;
    for (auto _ : state) {
        z += 1e-5;
        if (z > 5.0) z = -5.0;
        benchmark::DoNotOptimize(dgcm::eval_covariate_basis(z, count, 1.0));
    }
}
BENCHMARK(BM_CovariateBasis)->Arg(4)->Arg(10);

}  // namespace
