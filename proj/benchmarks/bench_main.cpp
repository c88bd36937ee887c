// Microbenchmarks for the hot paths: partitioning, plan construction,
// frequency scoring and closed-form plan propagation.

#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gtr/fts.hpp"
#include "gtr/gmrf.hpp"
#include "gtr/grid.hpp"
#include "gtr/plan.hpp"
#include "gtr/rng.hpp"

namespace {

void BM_partition_stages(benchmark::State& state) {
    const gtr::GridShape shape{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
    for (auto _ : state) {
        benchmark::DoNotOptimize(gtr::partition_stages(shape, 3));
    }
}
BENCHMARK(BM_partition_stages)->Arg(16)->Arg(32)->Arg(64);

void BM_build_plan(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const auto partition = gtr::partition_stages({side, side}, 3);
    const gtr::GenerationRates rates{{2.67, 10.67, 64.0}};
    const gtr::DiffusionSchedule sched;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gtr::build_plan(partition, rates, sched, 42));
    }
}
BENCHMARK(BM_build_plan)->Arg(16)->Arg(32);

void BM_fts_score(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    std::vector<double> z(dim);
    std::mt19937_64 rng(gtr::mix64(7));
    for (double& v : z) v = gtr::uniform_unit(rng) - 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gtr::fts_score(z));
    }
}
BENCHMARK(BM_fts_score)->Arg(16)->Arg(64)->Arg(256);

void BM_propagate_plan(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const gtr::GmrfModel model = gtr::build_grid_gmrf({side, side}, 0.22, 1.0);
    const auto partition = gtr::partition_stages({side, side}, 3);
    const auto plan = gtr::build_plan(partition, {{3.2, 8.0, 32.0}}, {}, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gtr::propagate_plan(model, plan));
    }
}
BENCHMARK(BM_propagate_plan)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
