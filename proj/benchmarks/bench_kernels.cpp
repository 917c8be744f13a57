#include "reslab/bessel.hpp"
#include "reslab/dirac.hpp"
#include "reslab/fbi.hpp"
#include "reslab/phasespace.hpp"
#include "reslab/symbols.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace reslab;

static void BM_BesselK2(benchmark::State& st) {
    const cplx z = std::polar(static_cast<double>(st.range(0)), 0.7);
    for (auto _ : st) benchmark::DoNotOptimize(bessel_k(2, z));
}
BENCHMARK(BM_BesselK2)->Arg(1)->Arg(10)->Arg(100);

static void BM_SymbolEval(benchmark::State& st) {
    double xi = 20.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(symbol_eval(1, xi));
        xi = xi < 2000.0 ? xi * 1.01 : 20.0;
    }
}
BENCHMARK(BM_SymbolEval);

static void BM_LevelSetVolume(benchmark::State& st) {
    auto v = ScalarPotential::gaussian(0.5);
    for (auto _ : st) benchmark::DoNotOptimize(level_set_volume(v, 0.2, Side::geq).value);
}
BENCHMARK(BM_LevelSetVolume);

static void BM_OmegaDirect(benchmark::State& st) {
    auto v2 = ScalarPotential::gaussian(0.5), v1 = ScalarPotential::zero();
    for (auto _ : st) benchmark::DoNotOptimize(omega_direct_at(v1, v2, 1.3));
}
BENCHMARK(BM_OmegaDirect);

static void BM_FbiTransform(benchmark::State& st) {
    auto u = UniformSamples::sample([](double y) { return y > 0.0 ? 1.0 : 0.0; }, -2.0, 2.0, 1e-3);
    const double lam = static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(fbi_transform(u, 0.0, 1.0, lam, {}));
}
BENCHMARK(BM_FbiTransform)->Arg(50)->Arg(500);

static void BM_ChannelAssemble(benchmark::State& st) {
    auto v = ScalarPotential::gaussian(0.5);
    const double hbar = 1.0 / static_cast<double>(st.range(0));
    auto samples = sample_channel_potential(v, {0.0, 0.5}, max_step(hbar), 6.0);
    for (auto _ : st) benchmark::DoNotOptimize(assemble_channel(samples, -1, hbar).band.size());
}
BENCHMARK(BM_ChannelAssemble)->Arg(5)->Arg(10)->Arg(20);

static void BM_ChannelEigenvalues(benchmark::State& st) {
    auto v = ScalarPotential::gaussian(0.5);
    const double hbar = 1.0 / static_cast<double>(st.range(0));
    auto m = assemble_channel(v, -1, hbar, {0.0, 0.5}, max_step(hbar), 4.0);
    for (auto _ : st) benchmark::DoNotOptimize(channel_eigenvalues(m).size());
    st.counters["dim"] = static_cast<double>(m.dim());
}
BENCHMARK(BM_ChannelEigenvalues)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_RefineEigenvalue(benchmark::State& st) {
    auto v = ScalarPotential::gaussian(0.5);
    auto m = assemble_channel(v, -1, 0.1, {0.0, 0.5}, max_step(0.1), 5.0);
    const cplx z0(1.4916, -0.1503);
    for (auto _ : st) benchmark::DoNotOptimize(refine_eigenvalue(m, z0));
}
BENCHMARK(BM_RefineEigenvalue)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
