// Serial reference vs OpenMP simulation kernel.
//   ./bench_simulate --benchmark_counters_tabular=true
#include "insider/recursion.hpp"
#include "insider/simulate.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

namespace {

using namespace insider;

struct Fixture {
    MarketParams params;
    EquilibriumPath eq;
    SimConfig cfg;

    Fixture(int n_periods, std::int64_t n_paths)
        : params{1.0, 0.5, n_periods, 0.0}, eq(build_path(solve(ModelKind::RiskNeutral, params), params))
    {
        cfg.model = ModelKind::RiskNeutral;
        cfg.n_paths = n_paths;
        cfg.seed = 1;
    }
};

void BM_Serial(benchmark::State& state)
{
    const Fixture f(static_cast<int>(state.range(0)), 200'000);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_market_serial(f.eq, f.params, f.cfg));
    state.SetItemsProcessed(state.iterations() * f.cfg.n_paths);
}

void BM_Parallel(benchmark::State& state)
{
    Fixture f(static_cast<int>(state.range(0)), 200'000);
    f.cfg.threads = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_market(f.eq, f.params, f.cfg));
    state.SetItemsProcessed(state.iterations() * f.cfg.n_paths);
    state.counters["threads"] = f.cfg.threads;
}

void parallel_args(benchmark::internal::Benchmark* b)
{
    const int max_threads = omp_get_max_threads();
    for (int n : {5, 20}) {
        for (int t = 1; t <= max_threads; t *= 2) b->Args({n, t});
        if ((max_threads & (max_threads - 1)) != 0) b->Args({n, max_threads});
    }
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Apply(parallel_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
