#include "turnpike/operators.hpp"

#include <Eigen/Eigenvalues>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace turnpike {

Vec DiscreteOperator::apply(const Vec& u) const {
    const int m = n();
    if (static_cast<int>(u.size()) != m)
        throw std::invalid_argument("DiscreteOperator::apply: dimension mismatch");
    Vec y(m);
    for (int i = 0; i < m; ++i) {
        double s = diag[static_cast<std::size_t>(i)] * u[i];
        if (i > 0) s += sub[static_cast<std::size_t>(i)] * u[i - 1];
        if (i < m - 1) s += sup[static_cast<std::size_t>(i)] * u[i + 1];
        y[i] = s;
    }
    return y;
}

DiscreteOperator DiscreteOperator::transpose() const {
    DiscreteOperator t;
    t.grid = grid;
    t.is_adjoint = !is_adjoint;
    const int m = n();
    t.diag = diag;
    t.sub.assign(static_cast<std::size_t>(m), 0.0);
    t.sup.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 1; i < m; ++i) t.sub[static_cast<std::size_t>(i)] = sup[static_cast<std::size_t>(i - 1)];
    for (int i = 0; i < m - 1; ++i) t.sup[static_cast<std::size_t>(i)] = sub[static_cast<std::size_t>(i + 1)];
    return t;
}

Mat DiscreteOperator::dense() const {
    const int m = n();
    Mat A = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        A(i, i) = diag[static_cast<std::size_t>(i)];
        if (i > 0) A(i, i - 1) = sub[static_cast<std::size_t>(i)];
        if (i < m - 1) A(i, i + 1) = sup[static_cast<std::size_t>(i)];
    }
    return A;
}

DiscreteOperator assemble(const CoefficientField& coeffs, const Grid& g, bool adjoint) {
    const int n = g.n_interior();
    if (static_cast<int>(coeffs.a_interface.size()) != g.n_cells ||
        static_cast<int>(coeffs.b_node.size()) != n ||
        static_cast<int>(coeffs.p_node.size()) != n)
        throw std::invalid_argument("assemble: coefficient field inconsistent with grid");

    DiscreteOperator op;
    op.grid = g;
    op.is_adjoint = false;
    op.diag.resize(static_cast<std::size_t>(n));
    op.sub.assign(static_cast<std::size_t>(n), 0.0);
    op.sup.assign(static_cast<std::size_t>(n), 0.0);
    const double idx2 = 1.0 / (g.dx * g.dx);
    const double i2dx = 1.0 / (2.0 * g.dx);
    for (int i = 0; i < n; ++i) {
        const double al = coeffs.a_interface[static_cast<std::size_t>(i)];
        const double ar = coeffs.a_interface[static_cast<std::size_t>(i + 1)];
        const double b = coeffs.b_node[static_cast<std::size_t>(i)];
        op.diag[static_cast<std::size_t>(i)] = (al + ar) * idx2 + coeffs.p_node[static_cast<std::size_t>(i)];
        if (i > 0) op.sub[static_cast<std::size_t>(i)] = -al * idx2 - b * i2dx;
        if (i < n - 1) op.sup[static_cast<std::size_t>(i)] = -ar * idx2 + b * i2dx;
    }
    // The adjoint is the exact transpose of the primal stencil; at interior
    // nodes this coincides with the conservative centered form of -(b .)'.
    return adjoint ? op.transpose() : op;
}

double l2_inner(const Vec& u, const Vec& v, const Grid& g) {
    if (u.size() != v.size() || static_cast<int>(u.size()) != g.n_interior())
        throw std::invalid_argument("l2_inner: grid mismatch");
    return g.dx * dot(u.data(), v.data(), u.size());
}

double l2_norm(const Vec& u, const Grid& g) { return std::sqrt(l2_inner(u, u, g)); }

TridiagFactor shifted_factor(const DiscreteOperator& op, double alpha, double beta) {
    const int n = op.n();
    std::vector<double> d(static_cast<std::size_t>(n)), l(static_cast<std::size_t>(n)),
        u(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        d[static_cast<std::size_t>(i)] = alpha + beta * op.diag[static_cast<std::size_t>(i)];
        l[static_cast<std::size_t>(i)] = beta * op.sub[static_cast<std::size_t>(i)];
        u[static_cast<std::size_t>(i)] = beta * op.sup[static_cast<std::size_t>(i)];
    }
    return tridiag_factor(d, l, u);
}

Vec elliptic_solve(const DiscreteOperator& op, const Vec& rhs) {
    if (static_cast<int>(rhs.size()) != op.n())
        throw std::invalid_argument("elliptic_solve: rhs dimension mismatch");
    const TridiagFactor F = shifted_factor(op, 0.0, 1.0);
    Vec u = tridiag_solve(F, rhs);
    const double rn = rhs.norm();
    if (rn > 0.0) {
        // 1e-12 relative, widened by the backward-stability scale ||A|| ||u||
        // (the stencil carries 1/dx^2, so the plain ratio is unreachable on
        // fine grids even for exact solvers)
        double norm_a = 0.0;
        for (int i = 0; i < op.n(); ++i)
            norm_a = std::max(norm_a, std::abs(op.diag[static_cast<std::size_t>(i)]) +
                                          std::abs(op.sub[static_cast<std::size_t>(i)]) +
                                          std::abs(op.sup[static_cast<std::size_t>(i)]));
        const double res = (op.apply(u) - rhs).norm() / rn;
        const double tol =
            std::max(1e-12, 64.0 * std::numeric_limits<double>::epsilon() * norm_a * u.norm() / rn);
        if (!(res <= tol))
            throw std::runtime_error("elliptic_solve: residual " + std::to_string(res) +
                                     " above tolerance (near-singular system)");
    }
    return u;
}

double check_wellposedness(const DiscreteOperator& op_adjoint) {
    const int n = op_adjoint.n();
    TridiagFactor F, Ft;
    try {
        F = shifted_factor(op_adjoint, 0.0, 1.0);
        Ft = shifted_factor(op_adjoint.transpose(), 0.0, 1.0);
    } catch (const std::runtime_error&) {
        return 0.0;  // factorization already failed: numerically singular
    }
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * std::sin(2.7 * (i + 1));
    v /= v.norm();
    double rho = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Vec z = tridiag_solve(Ft, v);   // B^-T v
        Vec w = tridiag_solve(F, z);    // B^-1 B^-T v
        const double nw = w.norm();
        if (!std::isfinite(nw) || nw == 0.0) return 0.0;
        const double rho_new = nw;      // Rayleigh quotient of (B^T B)^-1 against unit v
        w /= nw;
        const bool done = std::abs(rho_new - rho) <= 1e-13 * rho_new && it > 3;
        rho = rho_new;
        v = w;
        if (done) break;
    }
    return 1.0 / std::sqrt(rho);
}

double smallest_eigenvalue(const DiscreteOperator& op) {
    const int n = op.n();
    TridiagFactor F = shifted_factor(op, 0.0, 1.0);
    Vec v = Vec::Ones(n);
    v /= v.norm();
    double mu = 0.0;
    for (int it = 0; it < 500; ++it) {
        Vec w = tridiag_solve(F, v);
        w /= w.norm();
        const double mu_new = w.dot(op.apply(w));
        const bool done = std::abs(mu_new - mu) <= 1e-12 * std::abs(mu_new) && it > 2;
        mu = mu_new;
        v = w;
        if (done) break;
    }
    // Rayleigh-quotient polish; a failing shifted factorization means the
    // shift already sits on the eigenvalue to rounding.
    for (int it = 0; it < 3; ++it) {
        try {
            TridiagFactor Fs = shifted_factor(op, -mu, 1.0);
            Vec w = tridiag_solve(Fs, v);
            w /= w.norm();
            mu = w.dot(op.apply(w));
            v = w;
        } catch (const std::runtime_error&) {
            break;
        }
    }
    return mu;
}

EigenBasis eigen_basis(const DiscreteOperator& op) {
    const int n = op.n();
    Vec d(n), off(std::max(n - 1, 0));
    Vec scale(n);
    scale[0] = 1.0;
    for (int i = 0; i < n; ++i) d[i] = op.diag[static_cast<std::size_t>(i)];
    for (int i = 1; i < n; ++i) {
        const double c = op.sub[static_cast<std::size_t>(i)];
        const double e = op.sup[static_cast<std::size_t>(i - 1)];
        if (!(c * e > 0.0))
            throw std::runtime_error(
                "eigen_basis: sub*sup <= 0 (advection too strong for this grid; "
                "centered stencil not symmetrizable)");
        scale[i] = scale[i - 1] * std::sqrt(e / c);
        off[i - 1] = std::copysign(std::sqrt(c * e), c);
    }

    Eigen::SelfAdjointEigenSolver<Mat> es;
    es.computeFromTridiagonal(d, off, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigen_basis: tridiagonal eigensolver failed");

    EigenBasis B;
    B.lam = es.eigenvalues();
    const Mat& Q = es.eigenvectors();
    // A = D^-1 (Q Lam Q^T) D with D = diag(scale)
    B.V = Q;
    B.Vinv = Q.transpose();
    for (int i = 0; i < n; ++i) {
        B.V.row(i) /= scale[i];
        B.Vinv.col(i) *= scale[i];
    }
    return B;
}

}  // namespace turnpike
