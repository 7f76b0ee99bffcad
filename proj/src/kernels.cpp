#include "turnpike/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace turnpike {

namespace {
Exec g_default = Exec::parallel;
}

Exec default_exec() { return g_default; }
void set_default_exec(Exec e) { g_default = e; }

int hardware_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Near-singular detection: a healthy elliptic factorization keeps pivots
// within a few orders of the diagonal scale, while an (almost) singular shift
// drives one pivot to ~sigma_min. The relative threshold sits far below the
// former and above the rounding level of the latter.
TridiagFactor tridiag_factor(const std::vector<double>& diag,
                             const std::vector<double>& sub,
                             const std::vector<double>& sup,
                             double rel_pivot_tol) {
    const int n = static_cast<int>(diag.size());
    if (static_cast<int>(sub.size()) != n || static_cast<int>(sup.size()) != n)
        throw std::invalid_argument("tridiag_factor: band size mismatch");
    double scale = 0.0;
    for (double d : diag) scale = std::max(scale, std::abs(d));
    const double tol = rel_pivot_tol * std::max(scale, 1.0);

    TridiagFactor F;
    F.n = n;
    F.sub.resize(n);
    F.diag_inv.resize(n);
    F.sup = sup;
    double u = diag[0];
    if (std::abs(u) <= tol)
        throw std::runtime_error("tridiag_factor: pivot " + std::to_string(u) +
                                 " below tolerance at row 0 (singular or near-singular system)");
    F.diag_inv[0] = 1.0 / u;
    for (int i = 1; i < n; ++i) {
        const double l = sub[i] * F.diag_inv[i - 1];
        F.sub[i] = l;
        u = diag[i] - l * sup[i - 1];
        if (std::abs(u) <= tol)
            throw std::runtime_error("tridiag_factor: pivot " + std::to_string(u) +
                                     " below tolerance at row " + std::to_string(i) +
                                     " (singular or near-singular system)");
        F.diag_inv[i] = 1.0 / u;
    }
    return F;
}

void tridiag_solve_inplace(const TridiagFactor& F, double* x) {
    const int n = F.n;
    for (int i = 1; i < n; ++i) x[i] -= F.sub[i] * x[i - 1];
    x[n - 1] *= F.diag_inv[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (x[i] - F.sup[i] * x[i + 1]) * F.diag_inv[i];
}

Vec tridiag_solve(const TridiagFactor& F, const Vec& rhs) {
    if (static_cast<int>(rhs.size()) != F.n)
        throw std::invalid_argument("tridiag_solve: rhs size mismatch");
    Vec x = rhs;
    tridiag_solve_inplace(F, x.data());
    return x;
}

void tridiag_solve_many(const TridiagFactor& F, Mat& B, Exec ex) {
    if (static_cast<int>(B.rows()) != F.n)
        throw std::invalid_argument("tridiag_solve_many: row count mismatch");
    parallel_for(B.cols(), [&](std::int64_t j) {
        tridiag_solve_inplace(F, B.col(j).data());
    }, ex);
}

void matmul(const Mat& A, const Mat& B, Mat& C, Exec ex) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
    C.resize(A.rows(), B.cols());
    const auto m = A.rows(), k = A.cols(), n = B.cols();
    parallel_for(m, [&](std::int64_t i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index p = 0; p < k; ++p) s += A(i, p) * B(p, j);
            C(i, j) = s;
        }
    }, ex);
}

void masked_quadratic(const Mat& P, const std::vector<int>& w, Mat& C, Exec ex) {
    const auto n = P.rows();
    C.resize(n, n);
    if (w.empty()) {
        C.setZero();
        return;
    }
    parallel_for(n, [&](std::int64_t i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (int q : w) s += P(i, q) * P(q, j);
            C(i, j) = s;
        }
    }, ex);
}

double dot(const double* a, const double* b, std::int64_t n, Exec ex) {
    return reduce_sum(n, [&](std::int64_t i) { return a[i] * b[i]; }, ex);
}

void axpy(double alpha, const double* x, double* y, std::int64_t n, Exec ex) {
    parallel_for(n, [&](std::int64_t i) { y[i] += alpha * x[i]; }, ex);
}

BandedLU::BandedLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(ld_) * n, 0.0), piv_(n, 0) {}

double& BandedLU::at(int i, int j) {
    const int r = kl_ + ku_ + i - j;
    if (i < 0 || i >= n_ || j < 0 || j >= n_ || r < kl_ || r >= ld_)
        throw std::out_of_range("BandedLU::at outside band");
    return ab_[static_cast<std::size_t>(j) * ld_ + r];
}

void BandedLU::factor() {
    // LAPACK dgbtrf-style elimination with partial pivoting within the band.
    auto ab = [&](int r, int j) -> double& { return ab_[static_cast<std::size_t>(j) * ld_ + r]; };
    for (int j = 0; j < n_; ++j) {
        const int km = std::min(kl_, n_ - 1 - j);
        int p = 0;
        double vmax = std::abs(ab(kl_ + ku_, j));
        for (int i = 1; i <= km; ++i) {
            const double v = std::abs(ab(kl_ + ku_ + i, j));
            if (v > vmax) { vmax = v; p = i; }
        }
        piv_[j] = j + p;
        if (vmax == 0.0)
            throw std::runtime_error("BandedLU: singular block system (zero pivot column " +
                                     std::to_string(j) + ")");
        const int jend = std::min(n_ - 1, j + kl_ + ku_);
        if (p != 0)
            for (int c = j; c <= jend; ++c)
                std::swap(ab(kl_ + ku_ + (j - c) + p, c), ab(kl_ + ku_ + (j - c), c));
        const double piv = ab(kl_ + ku_, j);
        for (int i = 1; i <= km; ++i) {
            const double l = ab(kl_ + ku_ + i, j) / piv;
            ab(kl_ + ku_ + i, j) = l;
            for (int c = j + 1; c <= jend; ++c)
                ab(kl_ + ku_ + i + (j - c), c) -= l * ab(kl_ + ku_ + (j - c), c);
        }
    }
    factored_ = true;
}

void BandedLU::solve(Vec& rhs) const {
    if (!factored_) throw std::logic_error("BandedLU::solve before factor");
    if (static_cast<int>(rhs.size()) != n_) throw std::invalid_argument("BandedLU: rhs size");
    auto ab = [&](int r, int j) -> double { return ab_[static_cast<std::size_t>(j) * ld_ + r]; };
    for (int j = 0; j < n_; ++j) {
        if (piv_[j] != j) std::swap(rhs[j], rhs[piv_[j]]);
        const int km = std::min(kl_, n_ - 1 - j);
        for (int i = 1; i <= km; ++i) rhs[j + i] -= ab(kl_ + ku_ + i, j) * rhs[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
        rhs[j] /= ab(kl_ + ku_, j);
        const int top = std::max(0, j - kl_ - ku_);
        for (int i = top; i < j; ++i) rhs[i] -= ab(kl_ + ku_ + i - j, j) * rhs[j];
    }
}

}  // namespace turnpike
