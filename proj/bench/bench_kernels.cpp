// Parallel kernels against their serial references.

#include "sif/markov.hpp"
#include "sif/mc.hpp"
#include "sif/presets.hpp"
#include "sif/sweep.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

using namespace sif;

namespace {

void threads_arg(benchmark::internal::Benchmark* b)
{
    for (int t = 1; t <= omp_get_num_procs(); t *= 2) b->Arg(t);
}

void BM_matrix_serial(benchmark::State& state)
{
    const auto m = example_preset(1).model(0.05);
    for (auto _ : state) benchmark::DoNotOptimize(build_matrix_serial(m, 64));
}

void BM_matrix_parallel(benchmark::State& state)
{
    omp_set_num_threads(static_cast<int>(state.range(0)));
    const auto m = example_preset(1).model(0.05);
    for (auto _ : state) benchmark::DoNotOptimize(build_matrix(m, 64));
}

SimConfig mc_config()
{
    SimConfig c;
    c.dt = 1e-3;
    c.trials = 2000;
    c.seed = 1;
    return c;
}

void BM_hits_serial(benchmark::State& state)
{
    const auto m = ou_model();
    for (auto _ : state) benchmark::DoNotOptimize(simulate_hit_serial(m, 0.0, ou_x0, mc_config()));
}

void BM_hits_parallel(benchmark::State& state)
{
    omp_set_num_threads(static_cast<int>(state.range(0)));
    const auto m = ou_model();
    for (auto _ : state) benchmark::DoNotOptimize(simulate_hit(m, 0.0, ou_x0, mc_config()));
}

SweepSpec sweep_spec()
{
    SweepSpec s;
    s.inputs = linspace(0.8, 2.0, 6);
    s.ks = linspace(0.0, 0.5, 6);
    return s;
}

void BM_sweep_serial(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(sweep_spec()));
}

void BM_sweep_parallel(benchmark::State& state)
{
    omp_set_num_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sweep(sweep_spec()));
}

} // namespace

BENCHMARK(BM_matrix_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matrix_parallel)->Apply(threads_arg)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hits_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hits_parallel)->Apply(threads_arg)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_parallel)->Apply(threads_arg)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
