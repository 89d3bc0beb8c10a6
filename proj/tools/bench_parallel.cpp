#include <benchmark/benchmark.h>

#include "crackle/census.hpp"
#include "crackle/limits.hpp"

using namespace crackle;

static void BM_IntegrateH_Serial(benchmark::State& st) {
    auto c = Constraint::connected(3);
    for (auto _ : st) benchmark::DoNotOptimize(reference::integrate_h(c, 2, st.range(0), 7));
}
static void BM_IntegrateH_Parallel(benchmark::State& st) {
    auto c = Constraint::connected(3);
    for (auto _ : st) benchmark::DoNotOptimize(integrate_h(c, 2, st.range(0), 7));
}
BENCHMARK(BM_IntegrateH_Serial)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IntegrateH_Parallel)->Arg(200000)->Unit(benchmark::kMillisecond);

static ExperimentConfig census_cfg(int reps) {
    ExperimentConfig cfg;
    cfg.alpha = 2.0;
    cfg.n_grid = {1e5};
    cfg.replications = reps;
    cfg.lambda_mc_samples = 20000;
    return cfg;
}

static void BM_Census_Serial(benchmark::State& st) {
    auto cfg = census_cfg(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(reference::run_replications(cfg));
}
static void BM_Census_Parallel(benchmark::State& st) {
    auto cfg = census_cfg(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(run_replications(cfg));
}
BENCHMARK(BM_Census_Serial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Census_Parallel)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
