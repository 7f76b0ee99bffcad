// Serial-reference vs OpenMP timings for the dense kernels that dominate the
// Riccati runs. Sizes match the default study grids.
#include <benchmark/benchmark.h>

#include <random>

#include "turnpike/kernels.hpp"

namespace {

using turnpike::Exec;
using turnpike::Mat;

Mat random_sym(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Mat A(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) A(i, j) = g(rng);
    return 0.5 * (A + A.transpose()).eval();
}

void bm_matmul(benchmark::State& state, Exec ex) {
    const int n = static_cast<int>(state.range(0));
    const Mat A = random_sym(n, 1), B = random_sym(n, 2);
    Mat C;
    for (auto _ : state) {
        turnpike::matmul(A, B, C, ex);
        benchmark::DoNotOptimize(C.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n) * n * n);
}

void bm_masked_quadratic(benchmark::State& state, Exec ex) {
    const int n = static_cast<int>(state.range(0));
    const Mat P = random_sym(n, 3);
    std::vector<int> w;
    for (int i = n / 4; i < 3 * n / 4; ++i) w.push_back(i);
    Mat C;
    for (auto _ : state) {
        turnpike::masked_quadratic(P, w, C, ex);
        benchmark::DoNotOptimize(C.data());
    }
}

void bm_tridiag_many(benchmark::State& state, Exec ex) {
    const int n = static_cast<int>(state.range(0));
    std::vector<double> d(n, 4.0), l(n, -1.0), u(n, -1.0);
    const turnpike::TridiagFactor F = turnpike::tridiag_factor(d, l, u);
    const Mat B0 = random_sym(n, 4);
    for (auto _ : state) {
        Mat B = B0;
        turnpike::tridiag_solve_many(F, B, ex);
        benchmark::DoNotOptimize(B.data());
    }
}

void bm_reduce(benchmark::State& state, Exec ex) {
    const int n = static_cast<int>(state.range(0));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = std::sin(0.1 * i);
    for (auto _ : state) {
        double s = turnpike::reduce_sum(n, [&](std::int64_t i) { return x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)]; }, ex);
        benchmark::DoNotOptimize(s);
    }
}

}  // namespace

BENCHMARK_CAPTURE(bm_matmul, serial, Exec::serial)->Arg(200)->Arg(400);
BENCHMARK_CAPTURE(bm_matmul, openmp, Exec::parallel)->Arg(200)->Arg(400);
BENCHMARK_CAPTURE(bm_masked_quadratic, serial, Exec::serial)->Arg(200)->Arg(400);
BENCHMARK_CAPTURE(bm_masked_quadratic, openmp, Exec::parallel)->Arg(200)->Arg(400);
BENCHMARK_CAPTURE(bm_tridiag_many, serial, Exec::serial)->Arg(200)->Arg(420);
BENCHMARK_CAPTURE(bm_tridiag_many, openmp, Exec::parallel)->Arg(200)->Arg(420);
BENCHMARK_CAPTURE(bm_reduce, serial, Exec::serial)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_reduce, openmp, Exec::parallel)->Arg(1 << 20);

BENCHMARK_MAIN();
