#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "turnpike/exec.hpp"

namespace turnpike {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thomas factorization of a tridiagonal matrix (no pivoting; callers deal
/// with diagonally dominant or shifted-elliptic systems). Throws
/// std::runtime_error when a pivot falls below rel_pivot_tol * max|diag|.
struct TridiagFactor {
    int n = 0;
    std::vector<double> sub;       // multipliers l_i
    std::vector<double> diag_inv;  // 1 / u_i
    std::vector<double> sup;       // original superdiagonal
};

TridiagFactor tridiag_factor(const std::vector<double>& diag,
                             const std::vector<double>& sub,
                             const std::vector<double>& sup,
                             double rel_pivot_tol = 1e-12);

void tridiag_solve_inplace(const TridiagFactor& F, double* x);
Vec tridiag_solve(const TridiagFactor& F, const Vec& rhs);

/// Solves F X = B column by column; columns are independent, so the parallel
/// path distributes them across threads.
void tridiag_solve_many(const TridiagFactor& F, Mat& B, Exec ex = default_exec());

/// C = A * B (dense). Parallel over rows of C; the inner accumulation order is
/// fixed, so serial and parallel results are bit-identical.
void matmul(const Mat& A, const Mat& B, Mat& C, Exec ex = default_exec());

/// C = P(:,w) * P(:,w)^T for symmetric P and an index subset w. This is the
/// quadratic Riccati term P diag(mask) P.
void masked_quadratic(const Mat& P, const std::vector<int>& w, Mat& C,
                      Exec ex = default_exec());

double dot(const double* a, const double* b, std::int64_t n, Exec ex = default_exec());
void axpy(double alpha, const double* x, double* y, std::int64_t n, Exec ex = default_exec());

/// General banded LU with partial pivoting (LAPACK-style band storage).
/// Used for the coupled steady optimality system (bandwidth 2).
class BandedLU {
  public:
    BandedLU(int n, int kl, int ku);
    /// Entry access while assembling; (i, j) must satisfy |i - j| <= max(kl, ku).
    double& at(int i, int j);
    void factor();                   // throws on a zero pivot column
    void solve(Vec& rhs) const;      // in place
    int size() const { return n_; }

  private:
    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;         // (2*kl + ku + 1) x n, column-major bands
    std::vector<int> piv_;
    bool factored_ = false;
};

}  // namespace turnpike
