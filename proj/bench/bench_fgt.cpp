// Serial and OpenMP direct summation against the FGT on uniform 2-D
// problems, plus one rollback step of the pricer.

#include <g2fgt/bermudan.hpp>
#include <g2fgt/experiments.hpp>

#include <benchmark/benchmark.h>

using namespace g2fgt;

namespace {

fgt::GaussSumProblem<2> problem(benchmark::State& state) {
    return uniform_problem_2d(static_cast<std::size_t>(state.range(0)), 2.0, 20.0, 3);
}

void BM_DirectSerial(benchmark::State& state) {
    const auto p = problem(state);
    for (auto _ : state) benchmark::DoNotOptimize(fgt::direct_gauss_sum(p, Execution::serial));
    state.SetComplexityN(state.range(0));
}

void BM_DirectParallel(benchmark::State& state) {
    const auto p = problem(state);
    for (auto _ : state) benchmark::DoNotOptimize(fgt::direct_gauss_sum(p, Execution::parallel));
    state.SetComplexityN(state.range(0));
}

void BM_FgtSerial(benchmark::State& state) {
    const auto p = problem(state);
    for (auto _ : state) benchmark::DoNotOptimize(fgt::fast_gauss_sum(p, {}, Execution::serial));
    state.SetComplexityN(state.range(0));
}

void BM_FgtParallel(benchmark::State& state) {
    const auto p = problem(state);
    for (auto _ : state) benchmark::DoNotOptimize(fgt::fast_gauss_sum(p, {}, Execution::parallel));
    state.SetComplexityN(state.range(0));
}

void BM_Rollback(benchmark::State& state) {
    const auto params = presets::usd_2018();
    const auto curve = DiscountCurve::flat(0.02, 10.0);
    const CurveSet curves{curve, curve};
    const int n_y = static_cast<int>(state.range(0));
    RotatedGrid later = build_grid(params, 2.0, n_y, 8.0);
    later.values.assign(later.size(), 1.0);
    const RotatedGrid earlier = build_grid(params, 1.75, n_y, 8.0);
    PricingSettings s;
    s.n_y = n_y;
    s.flags.use_fgt = state.range(1) != 0;
    s.execution = state.range(2) != 0 ? Execution::parallel : Execution::serial;
    for (auto _ : state) benchmark::DoNotOptimize(rollback(params, curves, earlier, later, s));
}

}  // namespace

BENCHMARK(BM_DirectSerial)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectParallel)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FgtSerial)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FgtParallel)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rollback)
    ->ArgNames({"n_y", "fgt", "parallel"})
    ->Args({50, 0, 0})
    ->Args({50, 0, 1})
    ->Args({50, 1, 0})
    ->Args({50, 1, 1})
    ->Args({200, 1, 0})
    ->Args({200, 1, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
