#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>
#include <random>

#include "turnpike/kernels.hpp"

using namespace turnpike;

namespace {

Mat random_mat(int r, int c, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Mat A(r, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < r; ++i) A(i, j) = g(rng);
    return A;
}

}  // namespace

TEST_CASE("tridiagonal factorization solves against a dense reference") {
    const int n = 57;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    std::vector<double> d(n), lo(n), up(n);
    for (int i = 0; i < n; ++i) {
        d[i] = 4.0 + u(rng);
        lo[i] = -u(rng);
        up[i] = -u(rng);
    }
    Mat A = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = d[i];
        if (i > 0) A(i, i - 1) = lo[i];
        if (i < n - 1) A(i, i + 1) = up[i];
    }
    const TridiagFactor F = tridiag_factor(d, lo, up);
    const Vec rhs = random_mat(n, 1, 7);
    const Vec x = tridiag_solve(F, rhs);
    CHECK((A * x - rhs).norm() / rhs.norm() <= 1e-13);
}

TEST_CASE("tridiagonal factorization rejects singular systems") {
    // second pivot vanishes: d1 - l1*u0/d0 = 1 - 1 = 0
    std::vector<double> d{1.0, 1.0, 3.0}, lo{0.0, 1.0, -1.0}, up{1.0, -1.0, 0.0};
    CHECK_THROWS_AS((void)tridiag_factor(d, lo, up), std::runtime_error);
}

TEST_CASE("multi-rhs tridiagonal solve: parallel path is bit-identical to serial") {
    const int n = 83, m = 37;
    std::vector<double> d(n, 4.0), lo(n, -1.0), up(n, -1.2);
    const TridiagFactor F = tridiag_factor(d, lo, up);
    const Mat B0 = random_mat(n, m, 11);
    Mat Bs = B0, Bp = B0;
    tridiag_solve_many(F, Bs, Exec::serial);
    tridiag_solve_many(F, Bp, Exec::parallel);
    CHECK(Bs == Bp);
}

TEST_CASE("matmul matches Eigen and is exec-invariant") {
    const Mat A = random_mat(41, 29, 1), B = random_mat(29, 53, 2);
    Mat Cs, Cp;
    matmul(A, B, Cs, Exec::serial);
    matmul(A, B, Cp, Exec::parallel);
    CHECK(Cs == Cp);
    CHECK((Cs - A * B).norm() <= 1e-12 * Cs.norm());
    Mat bad;
    CHECK_THROWS_AS(matmul(A, A, bad), std::invalid_argument);
}

TEST_CASE("masked quadratic equals P diag(mask) P") {
    const int n = 40;
    Mat P = random_mat(n, n, 5);
    P = (0.5 * (P + P.transpose())).eval();
    std::vector<int> w{3, 4, 5, 10, 22, 31};
    Vec mask = Vec::Zero(n);
    for (int i : w) mask[i] = 1.0;
    Mat Cs, Cp;
    masked_quadratic(P, w, Cs, Exec::serial);
    masked_quadratic(P, w, Cp, Exec::parallel);
    CHECK(Cs == Cp);
    const Mat ref = P * mask.asDiagonal() * P;
    CHECK((Cs - ref).norm() <= 1e-12 * ref.norm());
    Mat empty;
    masked_quadratic(P, {}, empty);
    CHECK(empty.norm() == 0.0);
}

TEST_CASE("deterministic reduction does not depend on the execution policy") {
    const int n = 100000;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = std::sin(0.001 * i) * 1e-3 + 1.0;
    const double s1 = reduce_sum(n, [&](std::int64_t i) { return x[static_cast<std::size_t>(i)]; },
                                 Exec::serial);
    const double s2 = reduce_sum(n, [&](std::int64_t i) { return x[static_cast<std::size_t>(i)]; },
                                 Exec::parallel);
    CHECK(s1 == s2);
}

TEST_CASE("banded LU with partial pivoting solves a bandwidth-2 system") {
    const int n = 64, kl = 2, ku = 2;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    Mat A = Mat::Zero(n, n);
    BandedLU lu(n, kl, ku);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
            const double v = (i == j ? 6.0 : 0.0) + g(rng);
            A(i, j) = v;
            lu.at(i, j) = v;
        }
    lu.factor();
    const Vec rhs = random_mat(n, 1, 19);
    Vec x = rhs;
    lu.solve(x);
    CHECK((A * x - rhs).norm() / rhs.norm() <= 1e-12);
    CHECK_THROWS_AS(lu.at(0, 10), std::out_of_range);
}
