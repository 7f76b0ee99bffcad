#include "turnpike/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace turnpike {

std::vector<double> deviation_curve(const OptimalSolution& sol, const SteadySolution& steady,
                                    const Grid& g) {
    if (sol.y.n_space() != static_cast<int>(steady.y_bar.size()))
        throw std::invalid_argument("deviation_curve: grid mismatch");
    const int M = sol.y.tg.n_steps;
    std::vector<double> d(static_cast<std::size_t>(M) + 1);
    for (int k = 0; k <= M; ++k)
        d[static_cast<std::size_t>(k)] = l2_norm(sol.y.at(k) - steady.y_bar, g) +
                                         l2_norm(sol.f.at(k) - steady.f_bar, g);
    return d;
}

namespace {

double envelope_at(double C, double mu, double t, double T) {
    return C * (std::exp(-mu * t) + std::exp(-mu * (T - t)));
}

}  // namespace

EnvelopeResult check_envelope(const std::vector<double>& d, double C, double mu,
                              const TimeGrid& tg, double norm_y0, double norm_yd, double floor) {
    if (!(C > 0.0 && mu > 0.0))
        throw std::invalid_argument("check_envelope: C and mu must be positive");
    EnvelopeResult r;
    r.C = C;
    r.mu = mu;
    r.floor = floor;
    r.ok = r.strict_ok = r.raw_ok = true;
    const double raw_scale = norm_y0 + norm_yd;
    for (int k = 0; k < static_cast<int>(d.size()); ++k) {
        const double dk = d[static_cast<std::size_t>(k)];
        const double bound = envelope_at(C, mu, tg.t(k), tg.T);
        if (dk > bound) r.strict_ok = false;
        if (dk > std::max(bound, floor)) r.ok = false;
        if (dk > std::max(raw_scale * bound, floor)) r.raw_ok = false;
        if (bound >= floor) r.worst_margin = std::max(r.worst_margin, dk / bound);
    }
    return r;
}

FitResult fit_decay_rate(const std::vector<double>& d, const TimeGrid& tg, double t_lo,
                         double t_hi, double floor) {
    double st = 0, sl = 0, stt = 0, stl = 0, sll = 0;
    int m = 0;
    for (int k = 0; k < static_cast<int>(d.size()); ++k) {
        const double t = tg.t(k);
        const double v = d[static_cast<std::size_t>(k)];
        if (t < t_lo || t > t_hi || !(v > floor)) continue;
        const double l = std::log(v);
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
        sll += l * l;
        ++m;
    }
    if (m < 3)
        throw std::runtime_error("fit_decay_rate: fewer than 3 points above the floor in window");
    const double det = m * stt - st * st;
    if (det == 0.0) throw std::runtime_error("fit_decay_rate: degenerate window");
    FitResult f;
    const double slope = (m * stl - st * sl) / det;
    f.intercept = (sl - slope * st) / m;
    f.mu_hat = -slope;
    f.n_points = m;
    const double ss_tot = sll - sl * sl / m;
    double ss_res = 0.0;
    // second pass for the residual sum
    for (int k = 0; k < static_cast<int>(d.size()); ++k) {
        const double t = tg.t(k);
        const double v = d[static_cast<std::size_t>(k)];
        if (t < t_lo || t > t_hi || !(v > floor)) continue;
        const double e = std::log(v) - (slope * t + f.intercept);
        ss_res += e * e;
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

IntegralCheck integral_turnpike_check(const OptimalSolution& sol, const SteadySolution& steady,
                                      double C, double mu, const Grid& g, double norm_yd) {
    const TimeGrid& tg = sol.y.tg;
    const int M = tg.n_steps;
    const int n = sol.y.n_space();
    Vec yavg = Vec::Zero(n), favg = Vec::Zero(n);
    for (int k = 0; k < M; ++k) yavg += sol.y.at(k);   // left rule, as in the cost
    for (int k = 1; k <= M; ++k) favg += sol.f.at(k);  // right rule
    yavg *= tg.dt / tg.T;
    favg *= tg.dt / tg.T;

    IntegralCheck c;
    c.lhs = l2_norm(yavg - steady.y_bar, g) + l2_norm(favg - steady.f_bar, g);
    const double ny0 = l2_norm(sol.y.at(0), g);
    c.bound = 2.0 * C * (ny0 + norm_yd) * (1.0 - std::exp(-mu * tg.T)) / (mu * tg.T);
    c.ok = c.lhs <= c.bound;
    return c;
}

TubeReport tubular_report(const std::vector<const OptimalSolution*>& sols, double C, double mu,
                          double norm_y0, double norm_yd, const Grid& g) {
    TubeReport rep;
    if (sols.empty()) return rep;
    const TimeGrid& tg = sols.front()->y.tg;
    rep.bound.resize(static_cast<std::size_t>(tg.n_steps) + 1);
    for (int k = 0; k <= tg.n_steps; ++k)
        rep.bound[static_cast<std::size_t>(k)] =
            C * (norm_y0 + norm_yd) *
            (std::exp(-mu * tg.t(k)) + std::exp(-mu * (tg.T - tg.t(k))) + norm_yd);
    for (const OptimalSolution* sol : sols) {
        sol->y.require_matches(tg, "tubular_report");
        std::vector<double> norms;
        bool inside = true;
        for (int k = 0; k <= tg.n_steps; ++k) {
            norms.push_back(l2_norm(sol->y.at(k), g));
            if (norms.back() > rep.bound[static_cast<std::size_t>(k)]) inside = false;
        }
        rep.state_norms.push_back(std::move(norms));
        rep.inside.push_back(inside);
    }
    return rep;
}

SweepReport epsilon_sweep(const SweepSetup& setup) {
    SweepReport rep;
    rep.epsilons = setup.epsilons;
    for (std::size_t i = 1; i < rep.epsilons.size(); ++i)
        if (!(rep.epsilons[i] < rep.epsilons[i - 1]))
            throw std::invalid_argument("epsilon_sweep: epsilons must be sorted descending");
    const std::size_t ne = rep.epsilons.size();
    rep.ok.assign(ne, false);
    rep.error.assign(ne, "");
    rep.reports.assign(ne, TurnpikeReport{});
    rep.state_norms.assign(ne, {});

    rep.a_h = homogenized_constant(setup.a_recipe);

    const double ny0 = l2_norm(setup.y0, setup.grid);
    const double nyd = l2_norm(setup.y_d, setup.grid);
    const ControlWindow window = make_window(setup.grid, setup.window_lo, setup.window_hi);

    struct Solved {
        OptimalSolution sol;
        SteadySolution steady;
    };
    std::vector<Solved> solved(ne);
    Solved homog;

    auto run_one = [&](const CoefficientRecipe& arec, Solved& out, TurnpikeReport& tr) {
        OCPConfig cfg;
        cfg.grid = setup.grid;
        cfg.timegrid = setup.timegrid;
        cfg.coeffs = sample_coefficients(arec, setup.b_recipe, setup.p_recipe, setup.grid,
                                         setup.sampling);
        cfg.window = window;
        cfg.y0 = setup.y0;
        cfg.y_d = setup.y_d;
        cfg.cg_tol = setup.cg_tol;
        cfg.cg_max_iter = setup.cg_max_iter;
        out.steady = solve_steady_ocp(cfg);
        out.sol = solve_evolutive_ocp(cfg);

        tr.d = deviation_curve(out.sol, out.steady, setup.grid);
        tr.envelope = check_envelope(tr.d, setup.C, setup.mu, setup.timegrid, ny0, nyd,
                                     setup.envelope_floor);
        tr.fit = fit_decay_rate(tr.d, setup.timegrid, setup.fit_lo_frac * setup.timegrid.T,
                                setup.fit_hi_frac * setup.timegrid.T, setup.fit_floor);
        const IntegralCheck ic =
            integral_turnpike_check(out.sol, out.steady, setup.C, setup.mu, setup.grid, nyd);
        tr.integral_lhs = ic.lhs;
        tr.integral_bound = ic.bound;
        tr.integral_ok = ic.ok;
        tr.mid_deviation = tr.d[static_cast<std::size_t>(setup.timegrid.n_steps / 2)];
        tr.cost = out.sol.cost;
        tr.iterations = out.sol.iterations;
    };

    parallel_for(static_cast<std::int64_t>(ne) + 1, [&](std::int64_t q) {
        try {
            if (q < static_cast<std::int64_t>(ne)) {
                CoefficientRecipe arec = setup.a_recipe;
                arec.epsilon = rep.epsilons[static_cast<std::size_t>(q)];
                run_one(arec, solved[static_cast<std::size_t>(q)],
                        rep.reports[static_cast<std::size_t>(q)]);
                rep.ok[static_cast<std::size_t>(q)] = true;
            } else {
                run_one(CoefficientRecipe::constant(rep.a_h), homog, rep.homogenized);
                rep.homogenized_ok = true;
            }
        } catch (const std::exception& e) {
            if (q < static_cast<std::int64_t>(ne))
                rep.error[static_cast<std::size_t>(q)] = e.what();
            else
                rep.homogenized_error = e.what();
        }
    });

    // Homogenization gaps and the tubular-neighborhood data.
    const int M = setup.timegrid.n_steps;
    rep.steady_norms.assign(ne, 0.0);
    if (rep.homogenized_ok) {
        for (int k = 0; k <= M; ++k)
            rep.homog_state_norms.push_back(l2_norm(homog.sol.y.at(k), setup.grid));
        rep.homog_steady_norm = l2_norm(homog.steady.y_bar, setup.grid);
    }
    std::vector<const OptimalSolution*> ok_sols;
    std::vector<std::size_t> ok_idx;
    for (std::size_t i = 0; i < ne; ++i)
        if (rep.ok[i]) {
            ok_sols.push_back(&solved[i].sol);
            ok_idx.push_back(i);
        }
    TubeReport tube = tubular_report(ok_sols, setup.C, setup.mu, ny0, nyd, setup.grid);
    rep.tube_bound = std::move(tube.bound);
    if (rep.tube_bound.empty()) {  // every entry failed; still emit the envelope
        for (int k = 0; k <= M; ++k)
            rep.tube_bound.push_back(setup.C * (ny0 + nyd) *
                                     (std::exp(-setup.mu * setup.timegrid.t(k)) +
                                      std::exp(-setup.mu * (setup.timegrid.T - setup.timegrid.t(k))) +
                                      nyd));
    }

    rep.control_gap.assign(ne, 0.0);
    rep.state_gap.assign(ne, 0.0);
    rep.steady_gap.assign(ne, 0.0);
    rep.tube_inside.assign(ne, false);
    for (std::size_t q = 0; q < ok_idx.size(); ++q) {
        const std::size_t i = ok_idx[q];
        rep.state_norms[i] = std::move(tube.state_norms[q]);
        rep.tube_inside[i] = tube.inside[q];
        rep.steady_norms[i] = l2_norm(solved[i].steady.y_bar, setup.grid);
        if (!rep.homogenized_ok) continue;
        Trajectory df = solved[i].sol.f;
        df.snaps -= homog.sol.f.snaps;
        rep.control_gap[i] = l2t_norm(df, setup.grid);
        double sg = 0.0;
        for (int k = 0; k <= M; ++k)
            sg = std::max(sg, l2_norm(solved[i].sol.y.at(k) - homog.sol.y.at(k), setup.grid));
        rep.state_gap[i] = sg;
        rep.steady_gap[i] = l2_norm(solved[i].steady.f_bar - homog.steady.f_bar, setup.grid);
    }

    int violations = 0;
    for (std::size_t i = 1; i < ne; ++i)
        if (rep.ok[i] && rep.ok[i - 1] && rep.control_gap[i] > rep.control_gap[i - 1]) ++violations;
    rep.gaps_trend_ok = violations <= 1;
    return rep;
}

}  // namespace turnpike
