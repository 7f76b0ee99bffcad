#include "turnpike/oracles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "turnpike/hum.hpp"
#include "turnpike/riccati.hpp"

namespace turnpike {

DenseKktSolution solve_dense_kkt(const OCPConfig& cfg) {
    const DiscreteOperator A = assemble(cfg.coeffs, cfg.grid, false);
    const int n = A.n();
    const int M = cfg.timegrid.n_steps;
    const double dt = cfg.timegrid.dt;
    const Mat Ad = A.dense();
    const Mat I = Mat::Identity(n, n);
    const Vec mask = Eigen::Map<const Vec>(cfg.window.mask.data(), n);

    // unknowns: y_1..y_M then psi_0..psi_{M-1}
    const int dim = 2 * M * n;
    Mat K = Mat::Zero(dim, dim);
    Vec rhs = Vec::Zero(dim);
    auto yblk = [&](int k) { return (k - 1) * n; };      // k = 1..M
    auto pblk = [&](int k) { return M * n + k * n; };    // k = 0..M-1

    for (int k = 0; k < M; ++k) {
        const int r = k * n;
        K.block(r, yblk(k + 1), n, n) = I + dt * Ad;
        if (k + 1 <= M - 1) K.block(r, pblk(k + 1), n, n) = dt * Mat(mask.asDiagonal());
        if (k == 0)
            rhs.segment(r, n) = cfg.y0;
        else
            K.block(r, yblk(k), n, n) -= I;
    }
    for (int k = 0; k < M; ++k) {
        const int r = M * n + k * n;
        K.block(r, pblk(k), n, n) = I + dt * Ad.transpose();
        if (k + 1 <= M - 1) K.block(r, pblk(k + 1), n, n) -= I;
        if (k >= 1) K.block(r, yblk(k), n, n) -= dt * I;
        rhs.segment(r, n) = -dt * cfg.y_d;
        if (k == 0) rhs.segment(r, n) += dt * cfg.y0;
    }
    const Vec s = Eigen::PartialPivLU<Mat>(K).solve(rhs);

    DenseKktSolution out;
    out.y.resize(n, M);
    out.psi.resize(n, M);
    for (int k = 0; k < M; ++k) {
        out.y.col(k) = s.segment(yblk(k + 1), n);
        out.psi.col(k) = s.segment(pblk(k), n);
    }
    out.f = Trajectory(cfg.timegrid, n);
    for (int k = 0; k <= M; ++k) {
        const Vec psi_k = k < M ? Vec(out.psi.col(k)) : Vec(Vec::Zero(n));
        out.f.col(k) = -psi_k.cwiseProduct(mask);
    }
    return out;
}

Trajectory solve_dense_hum(const DiscreteOperator& op, const ControlWindow& w, const Vec& y0,
                           const TimeGrid& tg, double delta) {
    const int n = op.n();
    const int M = tg.n_steps;
    const double dt = tg.dt;
    const Mat S = Eigen::PartialPivLU<Mat>(Mat::Identity(n, n) + dt * op.dense())
                      .solve(Mat::Identity(n, n));
    const Vec mask = Eigen::Map<const Vec>(w.mask.data(), n);

    // y_M = sum_m S^{M-m+1} dt chi f_m + S^M y0 =: L vec(f) + S^M y0
    Mat L(n, M * n);
    std::vector<Mat> powers(static_cast<std::size_t>(M) + 1);
    powers[0] = Mat::Identity(n, n);
    for (int j = 1; j <= M; ++j)
        powers[static_cast<std::size_t>(j)] = S * powers[static_cast<std::size_t>(j - 1)];
    for (int m = 1; m <= M; ++m)
        L.middleCols((m - 1) * n, n) =
            powers[static_cast<std::size_t>(M - m + 1)] * Mat(mask.asDiagonal()) * dt;

    const Mat H = Mat::Identity(M * n, M * n) + (1.0 / (delta * dt)) * (L.transpose() * L);
    const Vec rhs = -(1.0 / (delta * dt)) * (L.transpose() * (powers[static_cast<std::size_t>(M)] * y0));
    const Vec fvec = Eigen::LLT<Mat>(H).solve(rhs);

    Trajectory f(tg, n);
    for (int m = 1; m <= M; ++m) f.col(m) = fvec.segment((m - 1) * n, n);
    return f;
}

namespace {

struct Fix {
    std::vector<OracleOutcome>& out;
    void add(const std::string& name, double measured, double threshold, std::string note = "") {
        out.push_back({name, measured <= threshold, measured, threshold, std::move(note)});
    }
    void add_flag(const std::string& name, bool pass, double measured, double threshold,
                  std::string note = "") {
        out.push_back({name, pass, measured, threshold, std::move(note)});
    }
};

OCPConfig small_cfg(int N, double T, int M, double eps, double wlo, double whi, double cg_tol) {
    OCPConfig cfg;
    cfg.grid = build_grid(N);
    cfg.timegrid = TimeGrid(T, M);
    CoefficientRecipe a = CoefficientRecipe::sin2(0.5);
    a.epsilon = eps;
    const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
    cfg.coeffs = sample_coefficients(a, zero, zero, cfg.grid);
    cfg.window = make_window(cfg.grid, wlo, whi);
    const int n = cfg.grid.n_interior();
    cfg.y0.resize(n);
    cfg.y_d.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = cfg.grid.xi(i + 1);
        cfg.y0[i] = x * (x - 1.0);
        cfg.y_d[i] = 1.0;
    }
    cfg.cg_tol = cg_tol;
    cfg.cg_max_iter = 4000;
    return cfg;
}

double rel_traj_diff(const Trajectory& a, const Trajectory& b) {
    return (a.snaps - b.snaps).norm() / b.snaps.norm();
}

}  // namespace

std::vector<OracleOutcome> run_all_oracles(unsigned long seed) {
    std::vector<OracleOutcome> out;
    Fix fix{out};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    {  // closed-form harmonic means
        const double ah = homogenized_constant(CoefficientRecipe::sin2(0.5));
        fix.add("homogenized constant sin^2+1/2 vs sqrt(3)/2",
                std::abs(ah - std::sqrt(3.0) / 2.0) / (std::sqrt(3.0) / 2.0), 1e-8);
        CoefficientRecipe pw;
        pw.kind = CoefficientRecipe::Kind::piecewise_periodic;
        pw.breakpoints = {0.0, 0.5, 1.0};
        pw.values = {1.0, 3.0};
        fix.add("homogenized constant piecewise {1,3} vs 3/2",
                std::abs(homogenized_constant(pw) - 1.5), 1e-12);
    }

    {  // FD Laplacian spectrum
        const Grid g = build_grid(100);
        const CoefficientRecipe one = CoefficientRecipe::constant(1.0);
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        const auto coeffs = sample_coefficients(one, zero, zero, g);
        const DiscreteOperator A = assemble(coeffs, g, false);
        const double lam1 = smallest_eigenvalue(A);
        const double exact = 2.0 / (g.dx * g.dx) * (1.0 - std::cos(M_PI * g.dx));
        fix.add("smallest eigenvalue vs closed-form FD spectrum",
                std::abs(lam1 - exact) / exact, 1e-10,
                "lam1 = " + std::to_string(lam1) + ", pi^2 within 0.1%");
        const double smin = check_wellposedness(assemble(coeffs, g, true));
        fix.add("sigma_min of adjoint equals lam1 (symmetric case)",
                std::abs(smin - exact) / exact, 1e-8);
    }

    {  // manufactured elliptic solution, O(dx^2)
        auto err_at = [&](int N) {
            const Grid g = build_grid(N);
            const CoefficientRecipe one = CoefficientRecipe::constant(1.0);
            const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
            const DiscreteOperator A = assemble(sample_coefficients(one, zero, zero, g), g, false);
            Vec rhs(g.n_interior());
            for (int i = 0; i < g.n_interior(); ++i)
                rhs[i] = M_PI * M_PI * std::sin(M_PI * g.xi(i + 1));
            const Vec u = elliptic_solve(A, rhs);
            double e = 0.0;
            for (int i = 0; i < g.n_interior(); ++i)
                e = std::max(e, std::abs(u[i] - std::sin(M_PI * g.xi(i + 1))));
            return e;
        };
        const double e100 = err_at(100), e200 = err_at(200);
        fix.add_flag("elliptic manufactured solution converges at order 2",
                     e100 / e200 > 3.8 && e100 / e200 < 4.2, e100 / e200, 4.0,
                     "max err N=200: " + std::to_string(e200));
    }

    {  // modal heat decay
        const Grid g = build_grid(100);
        const CoefficientRecipe one = CoefficientRecipe::constant(1.0);
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        const DiscreteOperator A = assemble(sample_coefficients(one, zero, zero, g), g, false);
        const TimeGrid tg(0.1, 400);
        Vec y0(g.n_interior());
        for (int i = 0; i < g.n_interior(); ++i) y0[i] = std::sin(M_PI * g.xi(i + 1));
        const Trajectory y = solve_forward(A, y0, nullptr, tg);
        const double ratio = l2_norm(y.at(400), g) / l2_norm(y0, g);
        fix.add("implicit Euler modal decay vs e^{-pi^2 T}",
                std::abs(ratio - std::exp(-M_PI * M_PI * 0.1)) / std::exp(-M_PI * M_PI * 0.1),
                0.02);
    }

    {  // duality pairing, gradient, Hessian symmetry
        OCPConfig cfg = small_cfg(33, 0.7, 24, 0.25, 0.3, 0.7, 1e-10);
        const int n = cfg.grid.n_interior();
        const int M = cfg.timegrid.n_steps;
        const DiscreteOperator A = assemble(cfg.coeffs, cfg.grid, false);
        const DiscreteOperator At = assemble(cfg.coeffs, cfg.grid, true);
        Trajectory fsrc(cfg.timegrid, n), gsrc(cfg.timegrid, n);
        for (int k = 0; k <= M; ++k)
            for (int i = 0; i < n; ++i) {
                fsrc.snaps(i, k) = gauss(rng);
                gsrc.snaps(i, k) = gauss(rng);
            }
        const Trajectory y = solve_forward(A, Vec::Zero(n), &fsrc, cfg.timegrid);
        const Trajectory psi = solve_backward(At, Vec::Zero(n), &gsrc, cfg.timegrid);
        double lhs = 0.0, rhs = 0.0;
        for (int k = 0; k < M; ++k) lhs += cfg.timegrid.dt * l2_inner(gsrc.at(k), y.at(k), cfg.grid);
        for (int k = 1; k <= M; ++k)
            rhs += cfg.timegrid.dt * l2_inner(fsrc.at(k), psi.at(k), cfg.grid);
        fix.add("forward/backward transposition identity", std::abs(lhs - rhs) / std::abs(rhs),
                1e-11);

        double worst_fd = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            Trajectory F(cfg.timegrid, n), D(cfg.timegrid, n);
            for (int k = 0; k <= M; ++k)
                for (int i = 0; i < n; ++i) {
                    F.snaps(i, k) = gauss(rng);
                    D.snaps(i, k) = gauss(rng);
                }
            const Trajectory G = reduced_gradient(F, cfg);
            const double h = 1e-4;
            Trajectory Fp = F, Fm = F;
            Fp.snaps += h * D.snaps;
            Fm.snaps -= h * D.snaps;
            const double fd = (evaluate_cost(Fp, cfg) - evaluate_cost(Fm, cfg)) / (2.0 * h);
            double ip = 0.0;
            for (int k = 1; k <= M; ++k)
                ip += cfg.timegrid.dt * l2_inner(G.at(k), D.at(k), cfg.grid);
            worst_fd = std::max(worst_fd, std::abs(fd - ip) / std::abs(ip));
        }
        fix.add("central-difference directional derivative vs adjoint gradient", worst_fd, 1e-6);

        // Hessian symmetry through the zero-data reduced map
        OCPConfig cfg0 = cfg;
        cfg0.y0.setZero();
        cfg0.y_d.setZero();
        Trajectory u(cfg.timegrid, n), v(cfg.timegrid, n);
        for (int k = 0; k <= M; ++k)
            for (int i = 0; i < n; ++i) {
                u.snaps(i, k) = gauss(rng);
                v.snaps(i, k) = gauss(rng);
            }
        const Trajectory Hu = reduced_gradient(u, cfg0), Hv = reduced_gradient(v, cfg0);
        double huv = 0.0, uhv = 0.0;
        for (int k = 1; k <= M; ++k) {
            huv += cfg.timegrid.dt * l2_inner(Hu.at(k), v.at(k), cfg.grid);
            uhv += cfg.timegrid.dt * l2_inner(u.at(k), Hv.at(k), cfg.grid);
        }
        fix.add("reduced Hessian symmetry <Hf,g> = <f,Hg>", std::abs(huv - uhv) / std::abs(huv),
                1e-10);
    }

    {  // dense KKT cross-check on the tiny instance
        OCPConfig cfg = small_cfg(9, 1.0, 8, 0.3, 0.3, 0.7, 1e-13);
        const OptimalSolution sol = solve_evolutive_ocp(cfg);
        const DenseKktSolution kkt = solve_dense_kkt(cfg);
        double worst = 0.0;
        for (int k = 1; k <= 8; ++k) {
            worst = std::max(worst, (sol.y.at(k) - kkt.y.col(k - 1)).cwiseAbs().maxCoeff());
            worst = std::max(worst, (sol.psi.at(k - 1) - kkt.psi.col(k - 1)).cwiseAbs().maxCoeff());
            worst = std::max(worst, (sol.f.at(k) - kkt.f.at(k)).cwiseAbs().maxCoeff());
        }
        fix.add("CG optimum vs dense KKT solve (N=9, M=8)", worst, 1e-9);
    }

    {  // steady spectral identity (A^2 + I) ybar = y_d
        OCPConfig cfg = small_cfg(201, 1.0, 2, 1.0, 0.0, 1.0, 1e-10);
        const CoefficientRecipe one = CoefficientRecipe::constant(1.0);
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        cfg.coeffs = sample_coefficients(one, zero, zero, cfg.grid);
        const SteadySolution st = solve_steady_ocp(cfg);
        const DiscreteOperator A = assemble(cfg.coeffs, cfg.grid, false);
        const Mat Ad = A.dense();
        const int n = A.n();
        const Vec yref = Eigen::PartialPivLU<Mat>(Ad * Ad + Mat::Identity(n, n)).solve(cfg.y_d);
        fix.add("steady solve vs spectral identity (A^2+I) ybar = y_d",
                (st.y_bar - yref).norm() / yref.norm(), 1e-6);
        // first Fourier-sine coefficient with the discrete eigenvalue
        const double lam1 = smallest_eigenvalue(A);
        Vec s1(n);
        for (int i = 0; i < n; ++i) s1[i] = std::sin(M_PI * cfg.grid.xi(i + 1));
        const double b1 = 2.0 * l2_inner(st.y_bar, s1, cfg.grid);
        const double b1_pred = 2.0 * l2_inner(cfg.y_d, s1, cfg.grid) / (lam1 * lam1 + 1.0);
        fix.add("steady first-mode coefficient vs (4/pi)/(lam1^2+1)",
                std::abs(b1 - b1_pred) / std::abs(b1_pred), 1e-6,
                "b1 = " + std::to_string(b1) + " (continuum 0.0129382)");
    }

    {  // ARE against the eigenbasis formula, plus the scalar case
        const Grid g = build_grid(101);
        const CoefficientRecipe one = CoefficientRecipe::constant(1.0);
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        const DiscreteOperator A = assemble(sample_coefficients(one, zero, zero, g), g, false);
        const ControlWindow w = make_window(g, 0.0, 1.0);
        const StationaryRiccati st = solve_are(A, w);
        const EigenBasis B = eigen_basis(A);
        Mat ref = Mat::Zero(A.n(), A.n());
        for (int i = 0; i < A.n(); ++i) {
            const double p = -B.lam[i] + std::sqrt(B.lam[i] * B.lam[i] + 1.0);
            ref += p * (B.V.col(i) * B.V.col(i).transpose());
        }
        fix.add("ARE vs -Lam + sqrt(Lam^2+I) in the eigenbasis",
                (st.P_hat - ref).norm() / ref.norm(), 1e-8,
                "CARE residual " + std::to_string(st.care_residual));

        DiscreteOperator scal;
        scal.grid = build_grid(4);  // placeholder geometry for the 1x1 case
        scal.grid.n_cells = 2;
        scal.grid.dx = 0.5;
        scal.grid.nodes = {0.0, 0.5, 1.0};
        scal.diag = {1.0};
        scal.sub = {0.0};
        scal.sup = {0.0};
        ControlWindow w1;
        w1.x_lo = 0.0;
        w1.x_hi = 1.0;
        w1.mask = {1.0};
        w1.indices = {0};
        const StationaryRiccati s1 = solve_are(scal, w1);
        fix.add("scalar ARE alpha=1: p = sqrt(2)-1",
                std::abs(s1.P_hat(0, 0) - (std::sqrt(2.0) - 1.0)), 1e-12);
    }

    {  // scalar Riccati flow vs tanh closed form through the actual stepper
        DiscreteOperator scal;
        scal.grid.n_cells = 2;
        scal.grid.dx = 0.5;
        scal.grid.nodes = {0.0, 0.5, 1.0};
        scal.diag = {8.0};  // 2a/dx^2 with a = 1 on the single interior node
        scal.sub = {0.0};
        scal.sup = {0.0};
        ControlWindow w1;
        w1.mask = {1.0};
        w1.indices = {0};
        const TimeGrid tg(1.0, 100000);
        const RiccatiFamily fam = solve_dre(scal, w1, tg, DreScheme::lyapunov_implicit);
        const double alpha = 8.0, lam = std::sqrt(alpha * alpha + 1.0);
        const double e = std::exp(-2.0 * lam * 1.0);
        const double pexact = (1.0 - e) / ((lam + alpha) + (lam - alpha) * e);
        fix.add("scalar Riccati flow vs tanh closed form", std::abs(fam.P[0](0, 0) - pexact),
                1e-8);
    }

    {  // evolutive cost vs the modal Riccati value
        OCPConfig cfg = small_cfg(64, 5.0, 20000, 1.0, 0.0, 1.0, 1e-10);
        const CoefficientRecipe one = CoefficientRecipe::constant(1.0);
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        cfg.coeffs = sample_coefficients(one, zero, zero, cfg.grid);
        const int n = cfg.grid.n_interior();
        for (int i = 0; i < n; ++i) cfg.y0[i] = std::sin(M_PI * cfg.grid.xi(i + 1));
        cfg.y_d.setZero();
        const OptimalSolution sol = solve_evolutive_ocp(cfg);
        const double lam1 = 2.0 / (cfg.grid.dx * cfg.grid.dx) * (1.0 - std::cos(M_PI * cfg.grid.dx));
        const double p1 = -lam1 + std::sqrt(lam1 * lam1 + 1.0);
        const double ref = 0.5 * p1 * l2_inner(cfg.y0, cfg.y0, cfg.grid);
        fix.add("evolutive cost vs (1/2) p1 ||y0||^2", std::abs(sol.cost - ref) / ref, 5e-3,
                "cost " + std::to_string(sol.cost));
    }

    {  // transition DRE reproduces the optimality-system adjoint; synthesis; identity
        OCPConfig cfg = small_cfg(65, 20.0, 64, 0.25, 0.0, 1.0, 1e-12);
        const DiscreteOperator A = assemble(cfg.coeffs, cfg.grid, false);
        const RiccatiFamily fam = solve_dre(A, cfg.window, cfg.timegrid, DreScheme::transition);

        OCPConfig cfg0 = cfg;
        cfg0.y_d.setZero();
        const OptimalSolution sol0 = solve_evolutive_ocp(cfg0);
        const Vec P0y = fam.P[0] * cfg.y0;
        fix.add("transition DRE reproduces psi(0) of the null-target system",
                (P0y - sol0.psi.at(0)).norm() / sol0.psi.at(0).norm(), 1e-6);

        const SteadySolution st = solve_steady_ocp(cfg);
        const Trajectory h = solve_h_equation(A, cfg.window, fam, st.psi_bar);
        const OptimalSolution synth = synthesize_feedback(cfg, fam, st, h);
        const OptimalSolution cg = solve_evolutive_ocp(cfg);
        const double df = rel_traj_diff(synth.f, cg.f);
        const double dy = rel_traj_diff(synth.y, cg.y);
        fix.add("Riccati-synthesized control vs CG optimum", std::max(df, dy), 1e-3,
                "measured " + std::to_string(std::max(df, dy)));
        fix.add_flag("synthesized cost is not below the CG optimum",
                     synth.cost >= cg.cost - 1e-9 * std::abs(cg.cost) &&
                         std::abs(synth.cost - cg.cost) <= 1e-6 * std::abs(cg.cost),
                     std::abs(synth.cost - cg.cost) / std::abs(cg.cost), 1e-6);

        const double lhs2 = 2.0 * sol0.cost;
        const Vec iya = cfg.y0 + cfg.timegrid.dt * A.apply(cfg.y0);
        const double rhs2 = l2_inner(iya, P0y, cfg.grid);
        fix.add("variational identity (E(T) y0, y0) = 2 min J", std::abs(lhs2 - rhs2) / lhs2,
                1e-6);
    }

    {  // dense HUM cross-check
        const Grid g = build_grid(9);
        CoefficientRecipe a = CoefficientRecipe::sin2(0.5);
        a.epsilon = 0.3;
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        const DiscreteOperator A = assemble(sample_coefficients(a, zero, zero, g), g, false);
        const ControlWindow w = make_window(g, 0.3, 0.7);
        const TimeGrid tg(1.0, 8);
        Vec y0(g.n_interior());
        for (int i = 0; i < g.n_interior(); ++i) {
            const double x = g.xi(i + 1);
            y0[i] = x * (x - 1.0);
        }
        const HumOptions opts{1e-13, 5000};
        const HumResult hr = penalized_null_control(A, w, y0, tg, 1e-4, opts);
        const Trajectory fd = solve_dense_hum(A, w, y0, tg, 1e-4);
        fix.add("penalized HUM CG vs dense normal equations (N=9, M=8)",
                (hr.control.snaps - fd.snaps).cwiseAbs().maxCoeff(), 1e-9);
    }

    return out;
}

}  // namespace turnpike
