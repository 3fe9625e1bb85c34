#include "subdiff/evolution.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace subdiff;

// Whole runs; cost is dominated by the O(N^2) memory term.
static void BM_PdeRun(benchmark::State& state) {
    const auto mesh = Mesh::interval(1.0, static_cast<int>(state.range(1)));
    const auto op = assemble(mesh, CoefficientField::constant(mesh, 1.0));
    const auto u0 = mesh.sample([](double x, double) { return std::sin(std::numbers::pi * x); });
    const TimeGrid grid{1.0 / state.range(0), static_cast<int>(state.range(0))};
    Problem problem(KernelPair::fractional(0.5), grid, op, Nonlinearity::quadratic(), u0);
    problem.snapshot_stride = grid.steps;
    for (auto _ : state) benchmark::DoNotOptimize(run_pde(problem));
}
BENCHMARK(BM_PdeRun)->Args({250, 99})->Args({500, 99})->Args({500, 399})->Unit(benchmark::kMillisecond);

static void BM_OdeBlowup(benchmark::State& state) {
    const TimeGrid grid = TimeGrid::from_horizon(2.0, 1e-3);
    Problem problem(KernelPair::fractional(0.5), grid, std::nullopt, Nonlinearity::quadratic(), Field::Constant(1, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(run_ode(problem));
}
BENCHMARK(BM_OdeBlowup)->Unit(benchmark::kMillisecond);
