#include "turnpike/riccati.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace turnpike {

namespace {

constexpr int kDenseGuard = 401;

void check_dense_guard(int n) {
    if (n > kDenseGuard)
        throw std::invalid_argument("riccati: dense solver guard, n = " + std::to_string(n) +
                                    " exceeds " + std::to_string(kDenseGuard));
}

double rel_asymmetry(const Mat& P) {
    const double nrm = P.norm();
    if (nrm == 0.0) return 0.0;
    return (P - P.transpose()).norm() / nrm;
}

/// One Lyapunov-implicit / quadratic-explicit step of length dt:
///   (I + dt(A^T . + . A)) E_next = E + dt (I - E chi E).
struct LyapunovStepper {
    EigenBasis B;
    Mat VT, WT;          // V^T and (V^-1)^T
    const std::vector<int>* win;
    Exec ex;
    Mat quad, t1, t2, tilde;

    LyapunovStepper(const DiscreteOperator& op, const ControlWindow& w, Exec e)
        : B(eigen_basis(op)), win(&w.indices), ex(e) {
        VT = B.V.transpose();
        WT = B.Vinv.transpose();
    }

    /// Advances E and returns the pre-symmetrization asymmetry of the result.
    double step(Mat& E, double dt) {
        const int n = static_cast<int>(E.rows());
        masked_quadratic(E, *win, quad, ex);
        Mat R = E + dt * Mat::Identity(n, n) - dt * quad;
        matmul(R, B.V, t1, ex);
        matmul(VT, t1, tilde, ex);
        parallel_for(n, [&](std::int64_t i) {
            for (int j = 0; j < n; ++j) tilde(i, j) /= 1.0 + dt * (B.lam[i] + B.lam[j]);
        }, ex);
        matmul(tilde, B.Vinv, t2, ex);
        matmul(WT, t2, E, ex);
        const double drift = rel_asymmetry(E);
        E = 0.5 * (E + E.transpose()).eval();
        return drift;
    }
};

Mat care_residual_matrix(const DiscreteOperator& op, const ControlWindow& w, const Mat& X) {
    const int n = static_cast<int>(X.rows());
    const Mat A = op.dense();
    Mat chiX = X;
    for (int i = 0; i < n; ++i) chiX.row(i) *= w.mask[static_cast<std::size_t>(i)];
    return A.transpose() * X + X * A + X * chiX - Mat::Identity(n, n);
}

}  // namespace

RiccatiFamily solve_dre(const DiscreteOperator& op, const ControlWindow& w, const TimeGrid& tg,
                        DreScheme scheme, Exec ex) {
    const int n = op.n();
    check_dense_guard(n);
    const int M = tg.n_steps;
    const double dt = tg.dt;

    RiccatiFamily fam;
    fam.tg = tg;
    fam.scheme = scheme;
    fam.P.assign(static_cast<std::size_t>(M) + 1, Mat());
    fam.P[static_cast<std::size_t>(M)] = Mat::Zero(n, n);

    if (scheme == DreScheme::lyapunov_implicit) {
        LyapunovStepper stepper(op, w, ex);
        Mat E = Mat::Zero(n, n);
        for (int j = 0; j < M; ++j) {
            const double drift = stepper.step(E, dt);
            fam.max_asymmetry = std::max(fam.max_asymmetry, drift);
            if (fam.max_asymmetry > 1e-4)
                throw std::runtime_error("solve_dre: symmetry drift above 1e-4");
            fam.P[static_cast<std::size_t>(M - 1 - j)] = E;
        }
        if (fam.max_asymmetry > 1e-8)
            std::fprintf(stderr, "solve_dre: warning, re-symmetrized drift %.2e\n",
                         fam.max_asymmetry);
        return fam;
    }

    // transition scheme
    const DiscreteOperator At = op.transpose();
    const TridiagFactor Gt = shifted_factor(At, 1.0, dt);
    const Mat A = op.dense();
    const Mat I = Mat::Identity(n, n);
    for (int k = M - 1; k >= 0; --k) {
        const Mat& Pn = fam.P[static_cast<std::size_t>(k + 1)];
        Mat K = I + dt * A;
        for (int i = 0; i < n; ++i)
            if (w.mask[static_cast<std::size_t>(i)] != 0.0) K.row(i) += dt * Pn.row(i);
        Eigen::PartialPivLU<Mat> lu(K.transpose());
        Mat W = lu.solve(Pn.transpose()).transpose();  // P_{k+1} K^-1
        Mat rhs = W + dt * I;
        tridiag_solve_many(Gt, rhs, ex);
        fam.max_asymmetry = std::max(fam.max_asymmetry, rel_asymmetry(rhs));
        fam.P[static_cast<std::size_t>(k)] = std::move(rhs);
    }
    // Asymmetry of the transition map with a strict window is intrinsic at
    // O(dt); it is reported, never repaired (repairing would break exactness).
    if (fam.max_asymmetry > 1e-8)
        std::fprintf(stderr, "solve_dre(transition): asymmetry %.2e left in place\n",
                     fam.max_asymmetry);
    return fam;
}

StationaryRiccati solve_are(const DiscreteOperator& op, const ControlWindow& w, AreMethod method,
                            Exec ex) {
    const int n = op.n();
    check_dense_guard(n);

    StationaryRiccati out;
    Mat X;

    if (method == AreMethod::sign_function) {
        // Scaled Newton iteration for sign(H); Hamiltonian in the convention
        // of the continuous problem y' = -A y + chi f, Q = R = I.
        Mat H(2 * n, 2 * n);
        H.topLeftCorner(n, n) = -op.dense();
        H.topRightCorner(n, n) = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) H(i, n + i) = w.mask[static_cast<std::size_t>(i)];
        H.bottomLeftCorner(n, n) = Mat::Identity(n, n);
        H.bottomRightCorner(n, n) = op.dense().transpose();

        Mat Z = H;
        int it = 0;
        for (; it < 100; ++it) {
            Eigen::PartialPivLU<Mat> lu(Z);
            double logdet = 0.0;
            for (int i = 0; i < 2 * n; ++i) logdet += std::log(std::abs(lu.matrixLU()(i, i)));
            const double ck = std::exp(-logdet / (2.0 * n));
            const Mat Zs = ck * Z;
            const Mat Znew = 0.5 * (Zs + Eigen::PartialPivLU<Mat>(Zs).inverse());
            const double rel = (Znew - Z).norm() / Znew.norm();
            Z = Znew;
            if (rel <= 1e-13) break;
        }
        out.iterations = it;

        Mat lhs(2 * n, n), rhs(2 * n, n);
        lhs.topRows(n) = Z.topRightCorner(n, n);
        lhs.bottomRows(n) = Z.bottomRightCorner(n, n) + Mat::Identity(n, n);
        rhs.topRows(n) = Z.topLeftCorner(n, n) + Mat::Identity(n, n);
        rhs.bottomRows(n) = Z.bottomLeftCorner(n, n);
        X = Eigen::ColPivHouseholderQR<Mat>(lhs).solve(rhs);
        X = 0.5 * (X + X.transpose()).eval();
    } else {
        X = Mat::Zero(n, n);
    }

    // Fixed-point polish / stationarity integration: the Lyapunov-implicit
    // step keeps the CARE solution invariant, so large steps contract onto it.
    LyapunovStepper stepper(op, w, ex);
    double dt = method == AreMethod::sign_function ? 8.0 : 0.5;
    int steps = 0;
    for (; steps < 400; ++steps) {
        Mat before = X;
        stepper.step(X, dt);
        const double rate = (X - before).norm() / dt;
        if (rate <= 1e-12) break;
        if (steps % 4 == 3) dt = std::min(2.0 * dt, 64.0);
    }
    out.iterations += steps;

    out.care_residual = care_residual_matrix(op, w, X).norm();
    if (!(out.care_residual <= 1e-10))
        throw std::runtime_error("solve_are: CARE residual " + std::to_string(out.care_residual) +
                                 " above 1e-10");
    out.P_hat = X;
    out.closed_loop = op.dense();
    for (int i = 0; i < n; ++i)
        out.closed_loop.row(i) += w.mask[static_cast<std::size_t>(i)] * X.row(i);
    return out;
}

Trajectory solve_h_equation(const DiscreteOperator& op, const ControlWindow& w,
                            const RiccatiFamily& fam, const Vec& psi_bar) {
    const int n = op.n();
    const TimeGrid& tg = fam.tg;
    const int M = tg.n_steps;
    const double dt = tg.dt;
    if (static_cast<int>(psi_bar.size()) != n)
        throw std::invalid_argument("solve_h_equation: psi_bar dimension mismatch");

    const DiscreteOperator At = op.transpose();
    const TridiagFactor Gt = shifted_factor(At, 1.0, dt);
    Trajectory h(tg, n);
    h.col(M) = -psi_bar;

    Vec masked(n), rhs(n);
    for (int k = M - 1; k >= 0; --k) {
        const Vec hn = h.at(k + 1);
        for (int i = 0; i < n; ++i) masked[i] = w.mask[static_cast<std::size_t>(i)] * hn[i];
        if (fam.scheme == DreScheme::transition) {
            // Exact affine remainder of the discrete optimality system:
            // h_k = G^T (h_{k+1} + dt^2 chi h_{k+1}) - dt P_k chi h_{k+1}.
            rhs = hn + dt * dt * masked;
            tridiag_solve_inplace(Gt, rhs.data());
            rhs.noalias() -= dt * (fam.P[static_cast<std::size_t>(k)] * masked);
        } else {
            // Stiff A* implicit, bounded reaction chi E h explicit at k+1.
            rhs = hn - dt * (fam.P[static_cast<std::size_t>(k + 1)] * masked).eval();
            tridiag_solve_inplace(Gt, rhs.data());
        }
        h.col(k) = rhs;
    }
    return h;
}

OptimalSolution synthesize_feedback(const OCPConfig& cfg, const RiccatiFamily& fam,
                                    const SteadySolution& steady, const Trajectory& h) {
    const DiscreteOperator A = assemble(cfg.coeffs, cfg.grid, false);
    const DiscreteOperator At = assemble(cfg.coeffs, cfg.grid, true);
    const int n = A.n();
    const TimeGrid& tg = cfg.timegrid;
    h.require_matches(tg, "synthesize_feedback");
    const int M = tg.n_steps;
    const double dt = tg.dt;
    const Mat Adense = A.dense();
    const Mat I = Mat::Identity(n, n);
    const auto& mask = cfg.window.mask;

    OptimalSolution sol;
    sol.y = Trajectory(tg, n);
    sol.f = Trajectory(tg, n);
    sol.y.col(0) = cfg.y0;

    Vec rhs(n), feed(n);
    for (int k = 0; k < M; ++k) {
        const Mat& Pn = fam.P[static_cast<std::size_t>(k + 1)];
        Mat K = I + dt * Adense;
        for (int i = 0; i < n; ++i)
            if (mask[static_cast<std::size_t>(i)] != 0.0) K.row(i) += dt * Pn.row(i);
        feed = steady.f_bar + Pn * steady.y_bar - h.at(k + 1);
        rhs = sol.y.at(k);
        for (int i = 0; i < n; ++i) rhs[i] += dt * mask[static_cast<std::size_t>(i)] * feed[i];
        const Vec ynext = Eigen::PartialPivLU<Mat>(K).solve(rhs);
        sol.y.col(k + 1) = ynext;
        const Vec fb = Pn * (ynext - steady.y_bar) + h.at(k + 1);
        for (int i = 0; i < n; ++i)
            sol.f.snaps(i, k + 1) =
                steady.f_bar[i] - mask[static_cast<std::size_t>(i)] * fb[i];
    }
    const Vec fb0 = fam.P[0] * (cfg.y0 - steady.y_bar) + h.at(0);
    for (int i = 0; i < n; ++i)
        sol.f.snaps(i, 0) = steady.f_bar[i] - mask[static_cast<std::size_t>(i)] * fb0[i];

    Trajectory mism = sol.y;
    for (int k = 0; k <= M; ++k) mism.col(k) -= cfg.y_d;
    sol.psi = solve_backward(At, Vec::Zero(n), &mism, tg);
    sol.cost = evaluate_cost(sol.f, cfg);
    Trajectory g = reduced_gradient(sol.f, cfg);
    sol.grad_norm = l2t_norm(g, cfg.grid) / std::max(l2t_norm(sol.f, cfg.grid), 1e-300);
    sol.iterations = 0;
    return sol;
}

std::vector<double> riccati_gap(const RiccatiFamily& fam, const StationaryRiccati& stat, Exec ex) {
    const int M = fam.tg.n_steps;
    std::vector<double> g(static_cast<std::size_t>(M) + 1, 0.0);
    parallel_for(M + 1, [&](std::int64_t k) {
        // E(t_k) = P_{M-k}; spectral norm of the symmetrized difference.
        Mat D = fam.P[static_cast<std::size_t>(M - k)] - stat.P_hat;
        D = 0.5 * (D + D.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Mat> es(D, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        g[static_cast<std::size_t>(k)] =
            std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
    }, ex);
    return g;
}

}  // namespace turnpike
