#include "turnpike/ocp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace turnpike {

namespace {

void apply_mask(const ControlWindow& w, Mat& U) {
    for (Eigen::Index j = 0; j < U.cols(); ++j)
        for (Eigen::Index i = 0; i < U.rows(); ++i)
            U(i, j) *= w.mask[static_cast<std::size_t>(i)];
}

}  // namespace

double l2t_norm(const Trajectory& u, const Grid& g) {
    const int M = u.tg.n_steps;
    const double s = reduce_sum(static_cast<std::int64_t>(M) * u.n_space(), [&](std::int64_t q) {
        const int k = static_cast<int>(q / u.n_space()) + 1;
        const int i = static_cast<int>(q % u.n_space());
        const double v = u.snaps(i, k);
        return v * v;
    });
    return std::sqrt(u.tg.dt * g.dx * s);
}

double evaluate_cost(const Trajectory& f, const OCPConfig& cfg) {
    f.require_matches(cfg.timegrid, "evaluate_cost");
    Trajectory src = f;  // the state equation sees chi_omega f
    apply_mask(cfg.window, src.snaps);
    const Trajectory y = solve_forward(assemble(cfg.coeffs, cfg.grid, false), cfg.y0, &src, cfg.timegrid);
    const int M = cfg.timegrid.n_steps;
    const int n = f.n_space();
    const double dtdx = cfg.timegrid.dt * cfg.grid.dx;
    const double jf = reduce_sum(static_cast<std::int64_t>(M) * n, [&](std::int64_t q) {
        const int k = static_cast<int>(q / n) + 1;
        const int i = static_cast<int>(q % n);
        const double v = f.snaps(i, k);
        return v * v;
    });
    const double jy = reduce_sum(static_cast<std::int64_t>(M) * n, [&](std::int64_t q) {
        const int k = static_cast<int>(q / n);  // 0 .. M-1
        const int i = static_cast<int>(q % n);
        const double v = y.snaps(i, k) - cfg.y_d[i];
        return v * v;
    });
    return 0.5 * dtdx * (jf + jy);
}

Trajectory reduced_gradient(const Trajectory& f, const OCPConfig& cfg) {
    f.require_matches(cfg.timegrid, "reduced_gradient");
    const DiscreteOperator A = assemble(cfg.coeffs, cfg.grid, false);
    const DiscreteOperator At = assemble(cfg.coeffs, cfg.grid, true);
    Trajectory src = f;
    apply_mask(cfg.window, src.snaps);
    Trajectory y = solve_forward(A, cfg.y0, &src, cfg.timegrid);
    for (int k = 0; k <= cfg.timegrid.n_steps; ++k) y.col(k) -= cfg.y_d;
    const Trajectory psi = solve_backward(At, Vec::Zero(A.n()), &y, cfg.timegrid);
    Trajectory g = f;
    for (int k = 0; k <= cfg.timegrid.n_steps; ++k)
        for (int i = 0; i < A.n(); ++i)
            g.snaps(i, k) += cfg.window.mask[static_cast<std::size_t>(i)] * psi.snaps(i, k);
    return g;
}

OptimalSolution solve_evolutive_ocp(const OCPConfig& cfg) {
    const DiscreteOperator A = assemble(cfg.coeffs, cfg.grid, false);
    const DiscreteOperator At = assemble(cfg.coeffs, cfg.grid, true);
    const int n = A.n();
    const int M = cfg.timegrid.n_steps;
    const TimeGrid& tg = cfg.timegrid;

    // Control block U holds f_1..f_M; the reduced Hessian is I + L*L with
    // L : f -> y(f; y0=0) and L* its dt-dx adjoint.
    auto forward_of = [&](const Mat& U, const Vec& y0) {
        Trajectory src(tg, n);
        src.snaps.rightCols(M) = U;
        apply_mask(cfg.window, src.snaps);
        return solve_forward(A, y0, &src, tg);
    };
    auto lstar = [&](Trajectory& g) {
        const Trajectory psi = solve_backward(At, Vec::Zero(n), &g, tg);
        Mat out = psi.snaps.rightCols(M);
        apply_mask(cfg.window, out);
        return out;
    };
    auto hmul = [&](const Mat& U) -> Mat {
        Trajectory y = forward_of(U, Vec::Zero(n));
        return U + lstar(y);
    };

    Trajectory yhom = solve_forward(A, cfg.y0, nullptr, tg);
    for (int k = 0; k <= M; ++k) yhom.col(k) -= cfg.y_d;
    Mat rhs = -lstar(yhom);

    const std::int64_t len = static_cast<std::int64_t>(n) * M;
    auto dotf = [&](const Mat& X, const Mat& Y) { return dot(X.data(), Y.data(), len); };

    Mat U = Mat::Zero(n, M);
    Mat r = rhs;
    Mat d = r;
    const double rr0 = dotf(r, r);
    double rr = rr0;
    int it = 0;
    if (rr0 > 0.0) {
        while (std::sqrt(rr / rr0) > cfg.cg_tol) {
            if (it >= cfg.cg_max_iter)
                throw std::runtime_error(
                    "solve_evolutive_ocp: cg_max_iter reached, relative gradient norm " +
                    std::to_string(std::sqrt(rr / rr0)));
            const Mat Hd = hmul(d);
            const double alpha = rr / dotf(d, Hd);
            U += alpha * d;
            r -= alpha * Hd;
            const double rr_new = dotf(r, r);
            d = r + (rr_new / rr) * d;
            rr = rr_new;
            ++it;
        }
    }

    OptimalSolution sol;
    sol.iterations = it;
    sol.grad_norm = rr0 > 0.0 ? std::sqrt(rr / rr0) : 0.0;
    sol.f = Trajectory(tg, n);
    sol.f.snaps.rightCols(M) = U;
    sol.y = forward_of(U, cfg.y0);
    Trajectory mism = sol.y;
    for (int k = 0; k <= M; ++k) mism.col(k) -= cfg.y_d;
    sol.psi = solve_backward(At, Vec::Zero(n), &mism, tg);
    // f_0 does not enter the discrete cost; close the optimality system at k=0.
    for (int i = 0; i < n; ++i)
        sol.f.snaps(i, 0) = -cfg.window.mask[static_cast<std::size_t>(i)] * sol.psi.snaps(i, 0);
    sol.cost = evaluate_cost(sol.f, cfg);
    return sol;
}

SteadySolution solve_steady_ocp(const OCPConfig& cfg) {
    const DiscreteOperator A = assemble(cfg.coeffs, cfg.grid, false);
    const DiscreteOperator At = assemble(cfg.coeffs, cfg.grid, true);
    const int n = A.n();

    // Interleave (y_i, psi_i); both stencils stay within bandwidth 2.
    BandedLU lu(2 * n, 2, 2);
    for (int i = 0; i < n; ++i) {
        const int ry = 2 * i, rp = 2 * i + 1;
        lu.at(ry, 2 * i) = A.diag[static_cast<std::size_t>(i)];
        if (i > 0) lu.at(ry, 2 * (i - 1)) = A.sub[static_cast<std::size_t>(i)];
        if (i < n - 1) lu.at(ry, 2 * (i + 1)) = A.sup[static_cast<std::size_t>(i)];
        lu.at(ry, rp) = cfg.window.mask[static_cast<std::size_t>(i)];

        lu.at(rp, rp) = At.diag[static_cast<std::size_t>(i)];
        if (i > 0) lu.at(rp, 2 * (i - 1) + 1) = At.sub[static_cast<std::size_t>(i)];
        if (i < n - 1) lu.at(rp, 2 * (i + 1) + 1) = At.sup[static_cast<std::size_t>(i)];
        lu.at(rp, 2 * i) = -1.0;
    }
    lu.factor();
    Vec rhs = Vec::Zero(2 * n);
    for (int i = 0; i < n; ++i) rhs[2 * i + 1] = -cfg.y_d[i];
    lu.solve(rhs);

    SteadySolution s;
    s.y_bar.resize(n);
    s.psi_bar.resize(n);
    s.f_bar.resize(n);
    for (int i = 0; i < n; ++i) {
        s.y_bar[i] = rhs[2 * i];
        s.psi_bar[i] = rhs[2 * i + 1];
        s.f_bar[i] = -cfg.window.mask[static_cast<std::size_t>(i)] * s.psi_bar[i];
    }

    const double scale = std::max(cfg.y_d.norm(), 1e-30);
    const double r1 = (A.apply(s.y_bar) + Vec(s.psi_bar.cwiseProduct(
                          Eigen::Map<const Vec>(cfg.window.mask.data(), n)))).norm() / scale;
    const double r2 = (At.apply(s.psi_bar) - s.y_bar + cfg.y_d).norm() / scale;
    if (!(r1 <= 1e-10 && r2 <= 1e-10))
        throw std::runtime_error("solve_steady_ocp: coupled residuals " + std::to_string(r1) +
                                 ", " + std::to_string(r2) + " exceed 1e-10");

    const Vec mism = s.y_bar - cfg.y_d;
    s.cost = 0.5 * (l2_inner(s.f_bar, s.f_bar, cfg.grid) + l2_inner(mism, mism, cfg.grid));
    return s;
}

}  // namespace turnpike
