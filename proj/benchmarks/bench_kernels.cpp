#include "subdiff/kernel.hpp"
#include "subdiff/special_functions.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace subdiff;

static void BM_DiscreteConv(benchmark::State& state) {
    const TimeGrid grid{1.0 / state.range(0), static_cast<int>(state.range(0))};
    const auto w = l_weights(KernelPair::fractional(0.5), grid);
    std::vector<double> v(grid.steps + 1);
    for (int n = 0; n <= grid.steps; ++n) v[n] = grid.time(n);
    for (auto _ : state) benchmark::DoNotOptimize(discrete_conv(w, v));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DiscreteConv)->RangeMultiplier(2)->Range(1 << 9, 1 << 13)->Complexity(benchmark::oNSquared);

static void BM_RelaxationFamily(benchmark::State& state) {
    const TimeGrid grid{1.0 / state.range(0), static_cast<int>(state.range(0))};
    const auto pair = KernelPair::fractional(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(relaxation_family(pair, 1.0, grid));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RelaxationFamily)->RangeMultiplier(2)->Range(1 << 9, 1 << 13)->Complexity(benchmark::oNSquared);

static void BM_DistributedWeights(benchmark::State& state) {
    const TimeGrid grid{1e-2, static_cast<int>(state.range(0))};
    const auto pair = KernelPair::distributed_order();
    for (auto _ : state) benchmark::DoNotOptimize(k_weights(pair, grid));
}
BENCHMARK(BM_DistributedWeights)->Arg(1000)->Arg(10000);

static void BM_MittagLeffler(benchmark::State& state) {
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(special::mittag_leffler_neg(0.5, x));
        x = x > 50.0 ? 0.0 : x + 0.37;
    }
}
BENCHMARK(BM_MittagLeffler);
