#include "varstop/diffusion.hpp"
#include "varstop/embedded.hpp"
#include "varstop/game.hpp"
#include "varstop/montecarlo.hpp"
#include "varstop/solver.hpp"

#include <benchmark/benchmark.h>

using namespace varstop;

namespace {

void BM_ScaleEval(benchmark::State& state) {
    const auto spec = tie_diffusion();
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(spec.scale(x));
        x = x < 20.0 ? x + 0.1 : 0.1;
    }
}
BENCHMARK(BM_ScaleEval);

void BM_ExitVariance(benchmark::State& state) {
    const auto spec = gbm(-1.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exit_variance(spec, 1.0, 0.25, 3.0));
    }
}
BENCHMARK(BM_ExitVariance);

void BM_MaximizerSet(benchmark::State& state) {
    const auto spec = tie_diffusion();
    const auto grid = build_embedded_grid(spec);
    for (auto _ : state) {
        benchmark::DoNotOptimize(maximizer_set(spec, grid, 0.6));
    }
}
BENCHMARK(BM_MaximizerSet);

void BM_TieScan(benchmark::State& state) {
    const auto spec = tie_diffusion();
    const auto grid = build_embedded_grid(spec);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            multi_maximizer_scan(spec, grid, 1e-5, 6.0));
    }
}
BENCHMARK(BM_TieScan)->Unit(benchmark::kMillisecond);

void BM_SolveGbmCold(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(gbm(-1.0, 1.0), 1.0));
    }
}
BENCHMARK(BM_SolveGbmCold)->Unit(benchmark::kMillisecond);

void BM_SolveTieWarm(benchmark::State& state) {
    SolverEngine engine(tie_diffusion());
    engine.solve(1.0); // prime the scan caches
    double x = 0.8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(engine.solve(x));
        x = x < 2.9 ? x + 0.05 : 0.8;
    }
}
BENCHMARK(BM_SolveTieWarm);

void BM_DualSolve(benchmark::State& state) {
    const auto spec = tie_diffusion();
    const auto grid = build_embedded_grid(spec);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dual_solve(spec, grid, 1.0));
    }
}
BENCHMARK(BM_DualSolve)->Unit(benchmark::kMillisecond);

void BM_SampleMix(benchmark::State& state) {
    const auto spec = tie_diffusion();
    const auto rule = StoppingRule::mix(
        0.7375, StoppingRule::exit_interval(0.0, 2.0),
        StoppingRule::exit_interval(0.0, 12.0));
    const SampleConfig cfg{1, static_cast<std::uint64_t>(state.range(0)),
                           static_cast<int>(state.range(1))};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_rule(spec, 1.0, rule, cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleMix)
    ->Args({100000, 1})
    ->Args({100000, 4})
    ->Args({1000000, 8})
    ->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
