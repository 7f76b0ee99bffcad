#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "turnpike/analysis.hpp"

using namespace turnpike;

namespace {

std::vector<double> synthetic(double amp, double rate, const TimeGrid& tg) {
    std::vector<double> d;
    for (int k = 0; k <= tg.n_steps; ++k) d.push_back(amp * std::exp(-rate * tg.t(k)));
    return d;
}

}  // namespace

TEST_CASE("envelope check on synthetic curves") {
    const TimeGrid tg(10.0, 100);
    const auto d = synthetic(5.0, 4.0, tg);
    const EnvelopeResult ok = check_envelope(d, 10.0, 4.0, tg, 1.0, 1.0, 1e-30);
    CHECK(ok.ok);
    CHECK(ok.strict_ok);
    CHECK(ok.worst_margin <= 0.5 + 1e-12);

    const EnvelopeResult tight = check_envelope(d, 1.0, 4.0, tg, 1.0, 1.0, 1e-30);
    CHECK_FALSE(tight.ok);
    CHECK(tight.worst_margin > 1.0);

    // an envelope decaying faster than the data fails near t = 0
    const EnvelopeResult steep = check_envelope(d, 10.0, 8.0, tg, 1.0, 1.0, 1e-30);
    CHECK_FALSE(steep.strict_ok);
    CHECK(steep.worst_margin > 1.0);
    CHECK_THROWS_AS((void)check_envelope(d, -1.0, 4.0, tg, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("envelope check is monotone in C") {
    const TimeGrid tg(8.0, 64);
    const auto d = synthetic(3.0, 3.5, tg);
    bool held = false;
    for (double C : {0.5, 1.0, 3.0, 10.0, 30.0}) {
        const EnvelopeResult r = check_envelope(d, C, 4.0, tg, 1.0, 1.0, 1e-30);
        if (held) CHECK(r.ok);  // once it holds it keeps holding for larger C
        held = held || r.ok;
    }
    CHECK(held);
}

TEST_CASE("decay-rate fit recovers exact log-linear data") {
    const TimeGrid tg(6.0, 120);
    const FitResult f = fit_decay_rate(synthetic(7.0, 3.0, tg), tg, 0.0, 3.0);
    CHECK(f.mu_hat == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decay-rate fit refuses a window below the floor") {
    const TimeGrid tg(6.0, 60);
    std::vector<double> flat(61, 1e-16);
    CHECK_THROWS_AS((void)fit_decay_rate(flat, tg, 0.0, 3.0, 1e-14), std::runtime_error);
    CHECK_THROWS_AS((void)fit_decay_rate(flat, tg, 4.0, 3.0, 1e-30), std::runtime_error);
}

TEST_CASE("mini sweep: constant coefficient collapses every gap") {
    SweepSetup s;
    s.grid = build_grid(40);
    s.timegrid = TimeGrid(12.0, 48);
    s.a_recipe = CoefficientRecipe::constant(0.9);
    const int n = s.grid.n_interior();
    s.y0.resize(n);
    s.y_d = Vec::Ones(n);
    for (int i = 0; i < n; ++i) {
        const double x = s.grid.xi(i + 1);
        s.y0[i] = x * (x - 1.0);
    }
    s.epsilons = {1.0, 0.1};
    const SweepReport rep = epsilon_sweep(s);
    REQUIRE(rep.homogenized_ok);
    CHECK(rep.a_h == doctest::Approx(0.9).epsilon(1e-10));
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
        REQUIRE(rep.ok[i]);
        CHECK(rep.control_gap[i] <= 1e-7);
        CHECK(rep.state_gap[i] <= 1e-7);
        CHECK(rep.steady_gap[i] <= 1e-10);
    }
}

TEST_CASE("mini sweep on the oscillating recipe: envelopes, trends, tube containment") {
    SweepSetup s;
    s.grid = build_grid(101);
    s.timegrid = TimeGrid(25.0, 84);
    s.a_recipe = CoefficientRecipe::sin2(0.5);
    const int n = s.grid.n_interior();
    s.y0.resize(n);
    s.y_d = Vec::Ones(n);
    for (int i = 0; i < n; ++i) {
        const double x = s.grid.xi(i + 1);
        s.y0[i] = x * (x - 1.0);
    }
    s.epsilons = {0.5, 0.1, 0.02};
    const SweepReport rep = epsilon_sweep(s);
    REQUIRE(rep.homogenized_ok);
    CHECK(rep.homogenized.envelope.ok);
    for (std::size_t i = 0; i < s.epsilons.size(); ++i) {
        REQUIRE(rep.ok[i]);
        CHECK(rep.reports[i].envelope.ok);
        CHECK(rep.reports[i].integral_ok);
        CHECK(rep.reports[i].mid_deviation <= 1e-5);
        CHECK(rep.tube_inside[i]);
        // the dip sits in the middle third: the minimum over [T/3, 2T/3]
        // reaches the global floor (exact ties inside the solver-noise
        // plateau are arbitrary, so the argmin itself is not assertable)
        const auto& d = rep.reports[i].d;
        const int M = s.timegrid.n_steps;
        double global_min = 1e300, middle_min = 1e300;
        for (int k = 0; k <= M; ++k) {
            global_min = std::min(global_min, d[static_cast<std::size_t>(k)]);
            if (k >= M / 3 && k <= 2 * M / 3)
                middle_min = std::min(middle_min, d[static_cast<std::size_t>(k)]);
        }
        CHECK(middle_min <= 10.0 * global_min);
        // integral lhs is dominated by the time-average of d (triangle inequality)
        double avg = 0.0;
        for (int k = 0; k <= M; ++k) avg += s.timegrid.dt * d[static_cast<std::size_t>(k)];
        CHECK(rep.reports[i].integral_lhs <= avg / s.timegrid.T + 1e-12);
    }
    CHECK(rep.gaps_trend_ok);
    CHECK(rep.control_gap.back() < rep.control_gap.front());
    // fitted decay rates are eps-uniform within 10% in the homogenization regime
    double lo = 1e300, hi = 0.0;
    for (const auto& r : rep.reports) {
        lo = std::min(lo, r.fit.mu_hat);
        hi = std::max(hi, r.fit.mu_hat);
        CHECK(r.fit.r2 >= 0.99);
    }
    CHECK((hi - lo) / hi <= 0.10);
}

TEST_CASE("integral turnpike: doubling the horizon halves the bound") {
    SweepSetup s;
    s.grid = build_grid(60);
    s.a_recipe = CoefficientRecipe::constant(1.0);
    const int n = s.grid.n_interior();
    s.y0.resize(n);
    s.y_d = Vec::Ones(n);
    for (int i = 0; i < n; ++i) s.y0[i] = s.grid.xi(i + 1) * (s.grid.xi(i + 1) - 1.0);
    s.epsilons = {1.0};
    double prev_bound = 0.0, prev_lhs = 0.0;
    for (double T : {10.0, 20.0}) {
        s.timegrid = TimeGrid(T, static_cast<int>(T) * 4);
        const SweepReport rep = epsilon_sweep(s);
        REQUIRE(rep.ok[0]);
        if (prev_bound > 0.0) {
            CHECK(rep.reports[0].integral_bound ==
                  doctest::Approx(0.5 * prev_bound).epsilon(1e-6));
            CHECK(rep.reports[0].integral_lhs < prev_lhs);
        }
        prev_bound = rep.reports[0].integral_bound;
        prev_lhs = rep.reports[0].integral_lhs;
    }
}

TEST_CASE("tubular report contains every optimal trajectory") {
    OCPConfig cfg;
    cfg.grid = build_grid(60);
    cfg.timegrid = TimeGrid(10.0, 40);
    const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
    cfg.coeffs = sample_coefficients(CoefficientRecipe::constant(1.0), zero, zero, cfg.grid);
    cfg.window = make_window(cfg.grid, 0.0, 1.0);
    const int n = cfg.grid.n_interior();
    cfg.y0.resize(n);
    cfg.y_d = Vec::Ones(n);
    for (int i = 0; i < n; ++i) cfg.y0[i] = cfg.grid.xi(i + 1) * (cfg.grid.xi(i + 1) - 1.0);
    const OptimalSolution sol = solve_evolutive_ocp(cfg);
    const double ny0 = l2_norm(cfg.y0, cfg.grid), nyd = l2_norm(cfg.y_d, cfg.grid);
    const TubeReport tube =
        tubular_report({&sol}, 10.0, 4.0, ny0, nyd, cfg.grid);
    REQUIRE(tube.inside.size() == 1);
    CHECK(tube.inside[0]);
    // zero problem: the zero trajectory sits trivially inside
    OCPConfig cfg0 = cfg;
    cfg0.y0.setZero();
    cfg0.y_d.setZero();
    const OptimalSolution sol0 = solve_evolutive_ocp(cfg0);
    const TubeReport t0 = tubular_report({&sol0}, 10.0, 4.0, 0.0, nyd, cfg.grid);
    CHECK(t0.inside[0]);
}

TEST_CASE("deviation curve: zero for the steady start, positive boundary layer otherwise") {
    OCPConfig cfg;
    cfg.grid = build_grid(40);
    cfg.timegrid = TimeGrid(4.0, 32);
    const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
    cfg.coeffs = sample_coefficients(CoefficientRecipe::constant(1.0), zero, zero, cfg.grid);
    cfg.window = make_window(cfg.grid, 0.0, 1.0);
    const int n = cfg.grid.n_interior();
    cfg.y0 = Vec::Zero(n);
    cfg.y_d = Vec::Zero(n);
    // y_d = 0: steady optimum is the origin, and starting there keeps d = 0
    const SteadySolution st0 = solve_steady_ocp(cfg);
    const OptimalSolution sol0 = solve_evolutive_ocp(cfg);
    for (double dk : deviation_curve(sol0, st0, cfg.grid)) CHECK(dk == 0.0);

    cfg.y_d = Vec::Ones(n);
    const SteadySolution st = solve_steady_ocp(cfg);
    const OptimalSolution sol = solve_evolutive_ocp(cfg);
    const auto d = deviation_curve(sol, st, cfg.grid);
    CHECK(d.front() > 0.0);  // y0 != ybar: entry layer exists
    Vec wrong = Vec::Ones(n + 1);
    OptimalSolution bad = sol;
    (void)bad;
    SteadySolution stw = st;
    stw.y_bar = wrong;
    CHECK_THROWS_AS((void)deviation_curve(sol, stw, cfg.grid), std::invalid_argument);
}

TEST_CASE("single-mode run decays geometrically inside the tube") {
    OCPConfig cfg;
    cfg.grid = build_grid(64);
    cfg.timegrid = TimeGrid(12.0, 96);
    const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
    cfg.coeffs = sample_coefficients(CoefficientRecipe::constant(1.0), zero, zero, cfg.grid);
    cfg.window = make_window(cfg.grid, 0.0, 1.0);
    const int n = cfg.grid.n_interior();
    cfg.y0.resize(n);
    cfg.y_d = Vec::Zero(n);
    for (int i = 0; i < n; ++i) cfg.y0[i] = std::sin(M_PI * cfg.grid.xi(i + 1));
    cfg.cg_tol = 1e-10;
    const OptimalSolution sol = solve_evolutive_ocp(cfg);
    const TubeReport tube = tubular_report({&sol}, 10.0, 4.0, l2_norm(cfg.y0, cfg.grid), 0.0,
                                           cfg.grid);
    CHECK(tube.inside[0]);
    // away from both layers the norm curve is a clean geometric decay
    FitResult fit;
    std::vector<double> norms = tube.state_norms[0];
    fit = fit_decay_rate(norms, cfg.timegrid, cfg.timegrid.T / 8.0, cfg.timegrid.T / 2.0, 1e-13);
    CHECK(fit.r2 >= 0.999);
    // and the rate is the closed-loop rate of the scheme, ln(1 + dt*lam_cl)/dt
    const double lam1 = 2.0 / (cfg.grid.dx * cfg.grid.dx) * (1.0 - std::cos(M_PI * cfg.grid.dx));
    const double lam_cl = std::sqrt(lam1 * lam1 + 1.0);
    const double expected = std::log(1.0 + cfg.timegrid.dt * lam_cl) / cfg.timegrid.dt;
    CHECK(fit.mu_hat == doctest::Approx(expected).epsilon(0.05));
}
