#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "nlac/hydro.hpp"
#include "nlac/kzk.hpp"
#include "nlac/npe.hpp"
#include "nlac/spectral.hpp"

using namespace nlac;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModelParams params() {
    ModelParams p = preset("nondim");
    p.nu = 0.01;
    return p;
}

// Beam profile on an (n_y x n_tau) grid with zero tau-mean.
Field beam(std::size_t ny, std::size_t nt) {
    const Grid g({Axis::periodic_axis("y", ny, 16.0, -8.0), Axis::periodic_axis("tau", nt, 1.0)});
    return Field::sample(g, [](std::span<const double> x) {
        return 0.05 * std::sin(kTwoPi * x[1]) * std::exp(-x[0] * x[0]);
    });
}

void BM_SpectralDerivative(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Field f = beam(64, n);
    const auto ax = spectral::PeriodicAxisHandle::of(f.grid(), "tau");
    for (auto _ : state) benchmark::DoNotOptimize(spectral::d_dx(f, ax, 1));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_SpectralDerivative)->RangeMultiplier(2)->Range(64, 512);

void BM_KzkRhs(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Field I = beam(n, n);
    const ModelParams p = params();
    for (auto _ : state) benchmark::DoNotOptimize(kzk_rhs({I}, p));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(I.size()));
}
BENCHMARK(BM_KzkRhs)->RangeMultiplier(2)->Range(32, 256);

void BM_NpeRhs(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Field q = beam(n, n);
    const ModelParams p = params();
    for (auto _ : state) benchmark::DoNotOptimize(npe_rhs({q}, p));
}
BENCHMARK(BM_NpeRhs)->Arg(128);

void BM_HydroStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const HydroScheme scheme = state.range(1) ? HydroScheme::spectral : HydroScheme::muscl;
    const ModelParams p = params();
    const Grid g({Axis::periodic_axis("x2", n / 2, 1.0), Axis::periodic_axis("x1", n, 1.0)});
    const Field rho = Field::sample(g, [](std::span<const double> x) { return 1.0 + 0.01 * std::sin(kTwoPi * x[1]); });
    const ConservedState u{rho, {Field::zeros(g), 0.01 * (rho - Field::constant(g, 1.0))}};
    const double dt = 0.2 / static_cast<double>(n);
    for (auto _ : state) benchmark::DoNotOptimize(step_hydro(u, p, dt, {.scheme = scheme}));
    state.SetLabel(scheme == HydroScheme::muscl ? "muscl" : "spectral");
}
BENCHMARK(BM_HydroStep)->ArgsProduct({{64, 128, 256}, {0, 1}});

}  // namespace
BENCHMARK_MAIN();
