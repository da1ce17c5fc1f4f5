#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "surfflow/driver.hpp"

using namespace surfflow;

namespace {

SurfaceMesh torus(int n) {
    GeneratorParams p;
    p.n_theta = 3 * n;
    p.n_phi = n;
    return generate_mesh(MeshKind::torus, p);
}

void BM_StiffnessAssembly(benchmark::State& state) {
    const auto m = torus(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(stiffness_p1(m));
    }
    state.SetItemsProcessed(state.iterations() * m.triangle_count());
}
BENCHMARK(BM_StiffnessAssembly)->Arg(16)->Arg(32)->Arg(64);

void BM_SpMV(benchmark::State& state) {
    const auto m = torus(static_cast<int>(state.range(0)));
    const auto K = stiffness_p1(m);
    std::vector<double> x(K.rows(), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(K * std::span<const double>(x));
    }
}
BENCHMARK(BM_SpMV)->Arg(32)->Arg(64);

void BM_PoissonSolve(benchmark::State& state) {
    const auto m = torus(static_cast<int>(state.range(0)));
    const auto K = stiffness_p1(m);
    const auto w = p1_weights(m);
    std::vector<double> b(K.rows());
    for (int i = 0; i < K.rows(); ++i) {
        b[i] = std::sin(0.37 * i);
    }
    const auto backend = state.range(1) ? SolverBackend::direct : SolverBackend::cg;
    const ConstrainedSolver solver(K, std::vector<char>(K.rows(), 0), w, CgOptions{1e-10, 0}, backend);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.solve(b));
    }
}
BENCHMARK(BM_PoissonSolve)->Args({32, 0})->Args({32, 1})->Args({64, 0})->Args({64, 1});

void BM_HodgeDecompose(benchmark::State& state) {
    const auto m = torus(static_cast<int>(state.range(0)));
    const HodgeProjector projector(m, homogeneous_spaces(m));
    const auto basis = harmonic_basis(m, 1);
    const HodgeDecomposer dec(projector, basis);
    const auto X = random_tangent_field(m, 1, 99);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dec.decompose(X));
    }
}
BENCHMARK(BM_HodgeDecompose)->Arg(16)->Arg(32);

void BM_Step(benchmark::State& state) {
    const auto m = torus(static_cast<int>(state.range(0)));
    const auto setup = homogeneous_setup(m);
    const auto basis = harmonic_basis(m, 1);
    SimConfig c;
    c.scheme = state.range(1) ? Scheme::euler : Scheme::navier_stokes;
    c.nu = 0.001;
    c.dt = 1e-3;
    const FlowSolver solver(m, setup, basis, c);
    const auto s0 = solver.ns_init(kh_torus_initial_velocity(m));
    const auto s = c.scheme == Scheme::euler ? solver.euler_init(s0.h, s0.omega) : s0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.step(s));
    }
}
BENCHMARK(BM_Step)->Args({32, 0})->Args({32, 1})->Unit(benchmark::kMillisecond);

} // namespace
int main(int argc, char** argv) {
    spdlog::set_level(spdlog::level::err);
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) {
        return 1;
    }
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
