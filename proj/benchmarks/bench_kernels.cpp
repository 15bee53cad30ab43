#include <benchmark/benchmark.h>

#include <random>

#include "lk/ct.hpp"
#include "lk/engine.hpp"
#include "lk/pde.hpp"
#include "lk/pdhg.hpp"

namespace {

lk::Grid noise_grid(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    lk::Grid g(r, c);
    for (double& v : g.values()) v = nd(rng);
    return g;
}

void BM_PdhgDenoise(benchmark::State& state) {
    const auto q = static_cast<std::size_t>(state.range(0));
    const lk::InnerSolver solver(lk::Penalty::quadratic_tv(1.0, lk::Box::nonnegative()));
    const lk::Grid xi = noise_grid(q, q, 5);
    int iters = 0;
    for (auto _ : state) {
        const lk::InnerResult r = solver.solve(xi, 1e-4);
        iters = r.iterations;
        benchmark::DoNotOptimize(r.pair.eps);
    }
    state.counters["pdhg_iters"] = iters;
}
BENCHMARK(BM_PdhgDenoise)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TomoAssemble(benchmark::State& state) {
    const auto geom = lk::ct::default_geometry(static_cast<std::size_t>(state.range(0)), 30);
    for (auto _ : state) benchmark::DoNotOptimize(lk::ct::build_parallel_tomo(geom).nnz());
}
BENCHMARK(BM_TomoAssemble)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_TomoApplyPair(benchmark::State& state) {
    const auto q = static_cast<std::size_t>(state.range(0));
    const auto geom = lk::ct::default_geometry(q, 45);
    const lk::SparseMatrix a = lk::ct::build_parallel_tomo(geom);
    const lk::Grid f = noise_grid(q * q, 1, 6);
    for (auto _ : state) benchmark::DoNotOptimize(a.apply_adjoint(a.apply(f.values())));
}
BENCHMARK(BM_TomoApplyPair)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_PdeState(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto setup = lk::pde::default_problem(m);
    for (auto _ : state) benchmark::DoNotOptimize(lk::pde::solve_state(setup.c_true, setup.mesh));
}
BENCHMARK(BM_PdeState)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CtOuterSteps(benchmark::State& state) {
    // 20 outer iterations on the desk-size CT problem
    const auto mode = state.range(0) ? lk::Mode::accelerated : lk::Mode::plain;
    const auto geom = lk::ct::default_geometry(64, 30);
    const lk::SparseMatrix a = lk::ct::build_parallel_tomo(geom);
    const lk::Grid y = lk::Grid::column(a.apply(lk::ct::shepp_logan(64).values()));
    lk::SolverConfig cfg;
    cfg.n_max = 20;
    for (auto _ : state) {
        lk::LinearProblem prob(a, 64, 64, y);
        lk::LandweberKaczmarz engine(prob, lk::InnerSolver(lk::Penalty::quadratic_tv(1.0, lk::Box::nonnegative())), cfg);
        benchmark::DoNotOptimize(engine.run(mode).trace.n_final);
    }
}
BENCHMARK(BM_CtOuterSteps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
