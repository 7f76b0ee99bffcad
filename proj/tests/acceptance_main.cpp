// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Grids and tolerances are pinned here; see README for how to run.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "turnpike/analysis.hpp"
#include "turnpike/config.hpp"
#include "turnpike/hum.hpp"
#include "turnpike/oracles.hpp"
#include "turnpike/riccati.hpp"

using namespace turnpike;

namespace {

int g_failures = 0;

void report(int num, const std::string& what, bool pass, const std::string& detail,
            bool warn_only = false) {
    const char* tag = pass ? "PASS" : (warn_only ? "WARN" : "FAIL");
    std::printf("[%s] criterion %2d: %s (%s)\n", tag, num, what.c_str(), detail.c_str());
    if (!pass && !warn_only) ++g_failures;
}

std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    const ExperimentConfig paper = load_config({});  // defaults = reference setup

    {  // 1: homogenized effective constant
        const auto t0 = std::chrono::steady_clock::now();
        const double ah = homogenized_constant(paper.a_recipe);
        const double secs = now_seconds(t0);
        report(1, "homogenized constant = 0.86603 +/- 1e-4, < 1 s",
               std::abs(ah - 0.86603) <= 1e-4 && secs < 1.0,
               "a_h = " + fmt(ah) + ", " + fmt(secs) + " s");
    }

    SweepReport sweep;  // shared by criteria 2, 8, 9
    {
        const auto t0 = std::chrono::steady_clock::now();
        sweep = epsilon_sweep(paper.sweep_setup());
        const double secs = now_seconds(t0);
        bool ok = sweep.homogenized_ok && sweep.homogenized.envelope.ok &&
                  sweep.homogenized.mid_deviation <= 1e-5;
        double worst = sweep.homogenized_ok ? sweep.homogenized.envelope.worst_margin : 1e300;
        for (std::size_t i = 0; i < sweep.epsilons.size(); ++i) {
            ok = ok && sweep.ok[i] && sweep.reports[i].envelope.ok &&
                 sweep.reports[i].mid_deviation <= 1e-5;
            if (sweep.ok[i]) worst = std::max(worst, sweep.reports[i].envelope.worst_margin);
        }
        ok = ok && secs <= 600.0;
        report(2, "figure-2 envelope d <= 10(e^{-4t}+e^{-4(T-t)}) for all eps + homogenized", ok,
               "worst margin " + fmt(worst) + " where bound > 1e-5 floor, " + fmt(secs) + " s");
    }

    {  // 3: steady energy bound, exact assertion
        bool ok = true;
        double worst = 0.0;
        for (std::size_t i = 0; i <= paper.epsilon_list.size(); ++i) {
            const bool homog = i == paper.epsilon_list.size();
            OCPConfig cfg = homog ? paper.ocp_config(1.0) : paper.ocp_config(paper.epsilon_list[i]);
            if (homog) {
                const CoefficientRecipe ah = CoefficientRecipe::constant(sweep.a_h);
                cfg.coeffs = sample_coefficients(ah, CoefficientRecipe::constant(0.0),
                                                 CoefficientRecipe::constant(0.0), cfg.grid);
            }
            const SteadySolution st = solve_steady_ocp(cfg);
            const double en =
                l2_inner(st.y_bar, st.y_bar, cfg.grid) + l2_inner(st.f_bar, st.f_bar, cfg.grid);
            const double bound = l2_inner(cfg.y_d, cfg.y_d, cfg.grid);
            ok = ok && en <= bound;
            worst = std::max(worst, en / bound);
        }
        report(3, "steady energy bound ||ybar||^2 + ||fbar||^2 <= ||y_d||^2, no tolerance", ok,
               "worst ratio " + fmt(worst));
    }

    {  // 4: Riccati synthesis vs CG on the paper config at n_cells = 201
        const auto t0 = std::chrono::steady_clock::now();
        ExperimentConfig rc = paper;
        rc.n_cells = 201;
        rc.cg_tol = 1e-10;
        OCPConfig cfg = rc.ocp_config(0.1);
        const DiscreteOperator A = assemble(cfg.coeffs, cfg.grid, false);
        const RiccatiFamily fam = solve_dre(A, cfg.window, cfg.timegrid, DreScheme::transition);
        const SteadySolution st = solve_steady_ocp(cfg);
        const Trajectory h = solve_h_equation(A, cfg.window, fam, st.psi_bar);
        const OptimalSolution synth = synthesize_feedback(cfg, fam, st, h);
        const OptimalSolution cg = solve_evolutive_ocp(cfg);
        const double df = (synth.f.snaps - cg.f.snaps).norm() / cg.f.snaps.norm();
        const double dy = (synth.y.snaps - cg.y.snaps).norm() / cg.y.snaps.norm();
        const double secs = now_seconds(t0);
        report(4, "feedback-synthesized (y,f) vs CG optimum <= 1e-3 at n_cells=201",
               std::max(df, dy) <= 1e-3 && secs <= 300.0,
               "rel discrepancy f " + fmt(df) + ", y " + fmt(dy) + ", " + fmt(secs) + " s");
    }

    {  // 5: spectral oracles
        const Grid g = build_grid(201);
        const CoefficientRecipe one = CoefficientRecipe::constant(1.0);
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        const auto coeffs = sample_coefficients(one, zero, zero, g);
        const DiscreteOperator A = assemble(coeffs, g, false);
        const ControlWindow w = make_window(g, 0.0, 1.0);

        const StationaryRiccati st = solve_are(A, w);
        const EigenBasis B = eigen_basis(A);
        Mat ref = Mat::Zero(A.n(), A.n());
        for (int i = 0; i < A.n(); ++i)
            ref += (-B.lam[i] + std::sqrt(B.lam[i] * B.lam[i] + 1.0)) *
                   (B.V.col(i) * B.V.col(i).transpose());
        const double are_err = (st.P_hat - ref).norm() / ref.norm();
        report(5, "(i) ARE matches -Lam + sqrt(Lam^2+I) in the eigenbasis to 1e-8",
               are_err <= 1e-8, "rel error " + fmt(are_err));

        OCPConfig cfg;
        cfg.grid = g;
        cfg.timegrid = TimeGrid(1.0, 2);
        cfg.coeffs = coeffs;
        cfg.window = w;
        cfg.y0 = Vec::Zero(A.n());
        cfg.y_d = Vec::Ones(A.n());
        const SteadySolution sst = solve_steady_ocp(cfg);
        Vec s1(A.n());
        for (int i = 0; i < A.n(); ++i) s1[i] = std::sin(M_PI * g.xi(i + 1));
        const double lam1 = smallest_eigenvalue(A);
        const double b1 = 2.0 * l2_inner(sst.y_bar, s1, g);
        const double b1_pred = 2.0 * l2_inner(cfg.y_d, s1, g) / (lam1 * lam1 + 1.0);
        const double steady_err = std::abs(b1 - b1_pred) / std::abs(b1_pred);
        report(5, "(ii) steady first-mode coefficient matches (A^2+I) modal formula to 1e-6",
               steady_err <= 1e-6,
               "rel error " + fmt(steady_err) + ", b1 = " + fmt(b1) + " (continuum 0.012938)");

        OCPConfig ec;
        ec.grid = build_grid(64);
        ec.timegrid = TimeGrid(5.0, 20000);
        ec.coeffs = sample_coefficients(one, zero, zero, ec.grid);
        ec.window = make_window(ec.grid, 0.0, 1.0);
        ec.y0.resize(ec.grid.n_interior());
        for (int i = 0; i < ec.grid.n_interior(); ++i)
            ec.y0[i] = std::sin(M_PI * ec.grid.xi(i + 1));
        ec.y_d = Vec::Zero(ec.grid.n_interior());
        ec.cg_tol = 1e-10;
        ec.cg_max_iter = 2000;
        const OptimalSolution sol = solve_evolutive_ocp(ec);
        const double l1 = 2.0 / (ec.grid.dx * ec.grid.dx) * (1.0 - std::cos(M_PI * ec.grid.dx));
        const double p1 = -l1 + std::sqrt(l1 * l1 + 1.0);
        const double cref = 0.5 * p1 * l2_inner(ec.y0, ec.y0, ec.grid);
        const double cerr = std::abs(sol.cost - cref) / cref;
        report(5, "(iii) evolutive cost matches (1/2) p1 ||y0||^2 to 0.5%", cerr <= 0.005,
               "rel error " + fmt(cerr));
    }

    {  // 6: dense KKT oracle
        OCPConfig cfg;
        cfg.grid = build_grid(9);
        cfg.timegrid = TimeGrid(1.0, 8);
        CoefficientRecipe a = CoefficientRecipe::sin2(0.5);
        a.epsilon = 0.3;
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        cfg.coeffs = sample_coefficients(a, zero, zero, cfg.grid);
        cfg.window = make_window(cfg.grid, 0.3, 0.7);
        cfg.y0.resize(cfg.grid.n_interior());
        cfg.y_d = Vec::Ones(cfg.grid.n_interior());
        for (int i = 0; i < cfg.grid.n_interior(); ++i) {
            const double x = cfg.grid.xi(i + 1);
            cfg.y0[i] = x * (x - 1.0);
        }
        cfg.cg_tol = 1e-13;
        cfg.cg_max_iter = 4000;
        const OptimalSolution sol = solve_evolutive_ocp(cfg);
        const DenseKktSolution kkt = solve_dense_kkt(cfg);
        double worst = 0.0;
        for (int k = 1; k <= 8; ++k) {
            worst = std::max(worst, (sol.y.at(k) - kkt.y.col(k - 1)).cwiseAbs().maxCoeff());
            worst = std::max(worst, (sol.psi.at(k - 1) - kkt.psi.col(k - 1)).cwiseAbs().maxCoeff());
            worst = std::max(worst, (sol.f.at(k) - kkt.f.at(k)).cwiseAbs().maxCoeff());
        }
        report(6, "CG optimum matches the dense KKT solve (N=9, M=8) to 1e-9", worst <= 1e-9,
               "max |diff| " + fmt(worst));
    }

    {  // 7: operator-gap decay shape and eps-uniform rate
        const Grid g = build_grid(paper.riccati_n_cells);
        const TimeGrid tg(paper.riccati_T, paper.riccati_n_steps);
        const ControlWindow w = make_window(g, 0.0, 1.0);
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        std::vector<double> rates;
        double min_r2 = 1.0;
        for (double eps : paper.riccati_epsilons) {
            CoefficientRecipe a = paper.a_recipe;
            a.epsilon = eps;
            const DiscreteOperator A = assemble(sample_coefficients(a, zero, zero, g), g, false);
            const RiccatiFamily fam = solve_dre(A, w, tg);
            const StationaryRiccati st = solve_are(A, w);
            const FitResult fit =
                fit_decay_rate(riccati_gap(fam, st), tg, 0.0, tg.T / 2.0, paper.gap_fit_floor);
            rates.push_back(fit.mu_hat);
            min_r2 = std::min(min_r2, fit.r2);
        }
        const double lo = *std::min_element(rates.begin(), rates.end());
        const double hi = *std::max_element(rates.begin(), rates.end());
        const double spread = (hi - lo) / hi;
        report(7, "log||E(t)-E_hat|| affine on [0,T/2], R^2 >= 0.99, rate spread <= 10%",
               min_r2 >= 0.99 && spread <= 0.10,
               "R^2 >= " + fmt(min_r2) + ", rates " + fmt(lo) + ".." + fmt(hi) + ", spread " +
                   fmt(100 * spread) + "%");
    }

    {  // 8: integral turnpike on the paper config
        bool ok = sweep.homogenized_ok && sweep.homogenized.integral_ok;
        double bound = sweep.homogenized_ok ? sweep.homogenized.integral_bound : 0.0;
        double worst = sweep.homogenized_ok ? sweep.homogenized.integral_lhs : 1e300;
        for (std::size_t i = 0; i < sweep.epsilons.size(); ++i) {
            ok = ok && sweep.ok[i] && sweep.reports[i].integral_ok;
            if (sweep.ok[i]) worst = std::max(worst, sweep.reports[i].integral_lhs);
        }
        report(8, "integral turnpike lhs <= 2C(||y0||+||y_d||)(1-e^{-mu T})/(mu T) ~ 0.1183", ok,
               "max lhs " + fmt(worst) + " vs bound " + fmt(bound));
    }

    {  // 9: homogenization trend of the control gap
        std::size_t i05 = 0, i0005 = 0;
        for (std::size_t i = 0; i < sweep.epsilons.size(); ++i) {
            if (sweep.epsilons[i] == 0.5) i05 = i;
            if (sweep.epsilons[i] == 0.005) i0005 = i;
        }
        const bool ok = sweep.ok[i05] && sweep.ok[i0005] &&
                        sweep.control_gap[i0005] < sweep.control_gap[i05];
        report(9, "control gap ||f_eps - f_h|| smaller at eps=0.005 than at eps=0.5", ok,
               fmt(sweep.control_gap[i0005]) + " < " + fmt(sweep.control_gap[i05]));
    }

    {  // 10: gradient correctness
        OCPConfig cfg;
        cfg.grid = build_grid(33);
        cfg.timegrid = TimeGrid(0.7, 24);
        CoefficientRecipe a = CoefficientRecipe::sin2(0.5);
        a.epsilon = 0.25;
        const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
        cfg.coeffs = sample_coefficients(a, zero, zero, cfg.grid);
        cfg.window = make_window(cfg.grid, 0.3, 0.7);
        const int n = cfg.grid.n_interior();
        const int M = cfg.timegrid.n_steps;
        cfg.y0.resize(n);
        cfg.y_d = Vec::Ones(n);
        for (int i = 0; i < n; ++i) cfg.y0[i] = std::sin(M_PI * cfg.grid.xi(i + 1));
        std::mt19937_64 rng(paper.seed);
        std::normal_distribution<double> gauss;
        auto rand_traj = [&]() {
            Trajectory t(cfg.timegrid, n);
            for (int k = 0; k <= M; ++k)
                for (int i = 0; i < n; ++i) t.snaps(i, k) = gauss(rng);
            return t;
        };
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Trajectory F = rand_traj(), D = rand_traj();
            const Trajectory G = reduced_gradient(F, cfg);
            const double h = 1e-4;
            Trajectory Fp = F, Fm = F;
            Fp.snaps += h * D.snaps;
            Fm.snaps -= h * D.snaps;
            const double fd = (evaluate_cost(Fp, cfg) - evaluate_cost(Fm, cfg)) / (2 * h);
            double ip = 0.0;
            for (int k = 1; k <= M; ++k)
                ip += cfg.timegrid.dt * l2_inner(G.at(k), D.at(k), cfg.grid);
            worst = std::max(worst, std::abs(fd - ip) / std::abs(ip));
        }
        OCPConfig cfg0 = cfg;
        cfg0.y0.setZero();
        cfg0.y_d.setZero();
        const Trajectory u = rand_traj(), v = rand_traj();
        const Trajectory Hu = reduced_gradient(u, cfg0), Hv = reduced_gradient(v, cfg0);
        double huv = 0.0, uhv = 0.0;
        for (int k = 1; k <= M; ++k) {
            huv += cfg.timegrid.dt * l2_inner(Hu.at(k), v.at(k), cfg.grid);
            uhv += cfg.timegrid.dt * l2_inner(u.at(k), Hv.at(k), cfg.grid);
        }
        const double sym = std::abs(huv - uhv) / std::abs(huv);
        report(10, "FD gradient to 1e-6 on 10 random pairs, Hessian symmetry to 1e-10",
               worst <= 1e-6 && sym <= 1e-10, "fd " + fmt(worst) + ", sym " + fmt(sym));
    }

    {  // 11: HUM uniformity probe (warning, not failure, above ratio 2)
        const Grid g = build_grid(paper.n_cells);
        const TimeGrid tg(paper.hum_T, paper.hum_n_steps);
        const ControlWindow w = make_window(g, paper.hum_window_lo, paper.hum_window_hi);
        HumOptions opts;
        opts.cg_tol = paper.hum_cg_tol;
        const HumSweep hs =
            controllability_cost_sweep(paper.a_recipe, paper.hum_epsilons, g, w,
                                       paper.y0_recipe.sample(g), tg, paper.hum_delta,
                                       paper.sampling, opts);
        report(11, "HUM cost max/min ratio <= 2 (boundedness is the theory claim)",
               hs.max_min_ratio <= 2.0,
               "ratio " + fmt(hs.max_min_ratio) +
                   (hs.max_min_ratio > 2.0 ? "; eps=1 free-decay disparity, see README" : ""),
               /*warn_only=*/true);
    }

    std::printf("%s: %d criterion failure(s)\n", g_failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE OK",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
