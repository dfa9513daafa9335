// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "atlasfbp/atlas_sim.hpp"
#include "atlasfbp/heat_semigroup.hpp"
#include "atlasfbp/initial_conditions.hpp"
#include "atlasfbp/kernels.hpp"
#include "atlasfbp/mild_solver.hpp"

using namespace atlas;

namespace {

template <Exec E>
void BM_convolve(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    HatKernel k = hat_kernel(1e-3, 1e-3);
    std::vector<double> ext(n + 2 * k.K), out(n);
    for (std::size_t i = 0; i < ext.size(); ++i) ext[i] = 2e-3 * static_cast<double>(i);
    for (auto _ : state) {
        convolve(E, ext, k, out, 0, n);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <Exec E>
void BM_smooth(benchmark::State& state) {
    Grid g = Grid::covering(-1.0, 8.0, 1e-3);
    MassProfile v = InitialDescriptor::linear(2.0).profile(g);
    for (auto _ : state) benchmark::DoNotOptimize(smooth(v, 1e-3, E));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.count));
}

template <Exec E>
void BM_particle_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto x = sample_ppp(InitialDescriptor::linear(2.0), n, 1, 4.0);
    Ensemble e(x, 1, 100.0);  // wide window: every particle stays active
    for (auto _ : state) {
        StepInfo s = step(e, 1e-5, n, E);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * x.size()));
}

template <Exec E>
void BM_duhamel(benchmark::State& state) {
    Grid g = Grid::covering(-1.0, 4.0, 1e-3);
    MassProfile v0 = InitialDescriptor::linear(1.0).profile(g);
    InitialSmoother s0(v0);
    std::vector<double> ts, vs;
    for (int k = 0; k <= 200; ++k) ts.push_back(0.25 * k / 200), vs.push_back(0.6 * std::sqrt(ts.back()));
    BoundaryPath sigma(ts, vs);
    Grid out = Grid::covering(-0.5, 1.5, 1e-3);
    for (auto _ : state) benchmark::DoNotOptimize(duhamel_profile(s0, sigma, 0.25, out, E));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * out.count));
}

}  // namespace

BENCHMARK(BM_convolve<Exec::serial>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_convolve<Exec::parallel>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_smooth<Exec::serial>);
BENCHMARK(BM_smooth<Exec::parallel>);
BENCHMARK(BM_particle_step<Exec::serial>)->Arg(1000)->Arg(4000);
BENCHMARK(BM_particle_step<Exec::parallel>)->Arg(1000)->Arg(4000);
BENCHMARK(BM_duhamel<Exec::serial>);
BENCHMARK(BM_duhamel<Exec::parallel>);

BENCHMARK_MAIN();
