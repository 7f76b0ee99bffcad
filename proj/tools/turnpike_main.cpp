#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "turnpike/analysis.hpp"
#include "turnpike/config.hpp"
#include "turnpike/hum.hpp"
#include "turnpike/io.hpp"
#include "turnpike/oracles.hpp"
#include "turnpike/riccati.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace turnpike;
using nlohmann::json;

constexpr const char* kVersion = "turnpike-lab 1.0.0";

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Run {
    ExperimentConfig cfg;
    std::filesystem::path out;
    Manifest manifest;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    bool quiet = false;

    void note(const std::string& msg) const {
        if (!quiet) std::printf("%s\n", msg.c_str());
    }
    std::filesystem::path artifact(const std::string& name) {
        manifest.artifact_files.push_back(name);
        return out / name;
    }
    void finish() {
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        manifest.timings.emplace_back(manifest.subcommand, manifest.wall_seconds);
        write_manifest(out, manifest);
    }
    void write_json(const std::string& name, const json& j) {
        std::ofstream f(artifact(name));
        f << j.dump(2) << '\n';
    }
};

json envelope_json(const EnvelopeResult& e) {
    return json{{"C", e.C},       {"mu", e.mu},
                {"floor", e.floor}, {"ok", e.ok},
                {"strict_ok", e.strict_ok}, {"worst_margin", e.worst_margin},
                {"raw_convention_ok", e.raw_ok}};
}

json fit_json(const FitResult& f) {
    return json{{"slope", -f.mu_hat}, {"mu_hat", f.mu_hat}, {"intercept", f.intercept},
                {"r2", f.r2},         {"n_points", f.n_points}};
}

json report_json(const TurnpikeReport& r) {
    return json{{"envelope", envelope_json(r.envelope)},
                {"fit", fit_json(r.fit)},
                {"integral", {{"lhs", r.integral_lhs}, {"bound", r.integral_bound}, {"ok", r.integral_ok}}},
                {"mid_deviation", r.mid_deviation},
                {"cost", r.cost},
                {"iterations", r.iterations}};
}

int run_solve(Run& run) {
    const double eps = run.cfg.single_epsilon();
    const OCPConfig ocp = run.cfg.ocp_config(eps);
    const OptimalSolution sol = solve_evolutive_ocp(ocp);
    write_trajectory_csv(run.artifact("y.csv"), sol.y, ocp.grid);
    write_trajectory_csv(run.artifact("f.csv"), sol.f, ocp.grid);
    write_trajectory_csv(run.artifact("psi.csv"), sol.psi, ocp.grid);
    run.write_json("summary.json", json{{"epsilon", eps},
                                        {"cost", sol.cost},
                                        {"iterations", sol.iterations},
                                        {"grad_norm", sol.grad_norm}});
    run.note("solve: cost " + std::to_string(sol.cost) + ", " + std::to_string(sol.iterations) +
             " CG iterations");
    return 0;
}

int run_steady(Run& run) {
    const double eps = run.cfg.single_epsilon();
    const OCPConfig ocp = run.cfg.ocp_config(eps);
    const SteadySolution st = solve_steady_ocp(ocp);
    std::vector<double> xs;
    for (int i = 0; i < ocp.grid.n_interior(); ++i) xs.push_back(ocp.grid.xi(i + 1));
    auto tovec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    write_columns_csv(run.artifact("steady.csv"), {{"x", xs},
                                                   {"y_bar", tovec(st.y_bar)},
                                                   {"f_bar", tovec(st.f_bar)},
                                                   {"psi_bar", tovec(st.psi_bar)}});
    const Vec mism = st.y_bar - ocp.y_d;
    const double en = l2_inner(st.y_bar, st.y_bar, ocp.grid) + l2_inner(st.f_bar, st.f_bar, ocp.grid);
    const double nyd2 = l2_inner(ocp.y_d, ocp.y_d, ocp.grid);
    run.write_json("summary.json",
                   json{{"epsilon", eps},
                        {"cost", st.cost},
                        {"energy", en},
                        {"energy_bound", nyd2},
                        {"energy_bound_ok", en <= nyd2},
                        {"tracking_error", l2_norm(mism, ocp.grid)}});
    run.note("steady: cost " + std::to_string(st.cost));
    return 0;
}

int run_turnpike(Run& run) {
    const double eps = run.cfg.single_epsilon();
    const OCPConfig ocp = run.cfg.ocp_config(eps);
    const SteadySolution st = solve_steady_ocp(ocp);
    const OptimalSolution sol = solve_evolutive_ocp(ocp);
    const auto d = deviation_curve(sol, st, ocp.grid);
    const double ny0 = l2_norm(ocp.y0, ocp.grid), nyd = l2_norm(ocp.y_d, ocp.grid);
    const EnvelopeResult env = check_envelope(d, run.cfg.turnpike_C, run.cfg.turnpike_mu,
                                              ocp.timegrid, ny0, nyd, run.cfg.envelope_floor);
    const FitResult fit =
        fit_decay_rate(d, ocp.timegrid, run.cfg.fit_lo_frac * ocp.timegrid.T,
                       run.cfg.fit_hi_frac * ocp.timegrid.T, std::max(1e-14, 10.0 * run.cfg.cg_tol));
    const IntegralCheck ic =
        integral_turnpike_check(sol, st, run.cfg.turnpike_C, run.cfg.turnpike_mu, ocp.grid, nyd);

    std::vector<double> ts, bound;
    for (int k = 0; k <= ocp.timegrid.n_steps; ++k) {
        ts.push_back(ocp.timegrid.t(k));
        bound.push_back(run.cfg.turnpike_C * (std::exp(-run.cfg.turnpike_mu * ts.back()) +
                                              std::exp(-run.cfg.turnpike_mu * (ocp.timegrid.T - ts.back()))));
    }
    write_columns_csv(run.artifact("turnpike.csv"), {{"t", ts}, {"d", d}, {"bound", bound}});
    run.write_json("report.json", json{{"epsilon", eps},
                                       {"envelope_ok", env.ok},
                                       {"envelope", envelope_json(env)},
                                       {"fit", fit_json(fit)},
                                       {"integral", {{"lhs", ic.lhs}, {"bound", ic.bound}, {"ok", ic.ok}}},
                                       {"d_mid", d[static_cast<std::size_t>(ocp.timegrid.n_steps / 2)]}});
    run.note(std::string("turnpike: envelope_ok=") + (env.ok ? "true" : "false") +
             ", fitted mu " + std::to_string(fit.mu_hat));
    return env.ok ? 0 : 3;
}

void write_sweep_outputs(Run& run, const SweepReport& rep, const ExperimentConfig& cfg,
                         bool tube_files) {
    const TimeGrid tg(cfg.T, cfg.n_steps);
    std::vector<double> col_eps, col_t, col_d, col_bound;
    for (std::size_t i = 0; i <= rep.epsilons.size(); ++i) {
        const bool homog = i == rep.epsilons.size();
        const TurnpikeReport& tr = homog ? rep.homogenized : rep.reports[i];
        if ((homog && !rep.homogenized_ok) || (!homog && !rep.ok[i])) continue;
        for (int k = 0; k <= tg.n_steps; ++k) {
            col_eps.push_back(homog ? 0.0 : rep.epsilons[i]);
            col_t.push_back(tg.t(k));
            col_d.push_back(tr.d[static_cast<std::size_t>(k)]);
            col_bound.push_back(cfg.turnpike_C * (std::exp(-cfg.turnpike_mu * tg.t(k)) +
                                                  std::exp(-cfg.turnpike_mu * (tg.T - tg.t(k)))));
        }
    }
    write_columns_csv(run.artifact("sweep.csv"),
                      {{"epsilon", col_eps}, {"t", col_t}, {"d", col_d}, {"bound", col_bound}});

    // figure 2: deviations under the uniform bound, log scale
    SvgPlot fig2("Uniform exponential turnpike", "t", "deviation", true);
    std::vector<double> ts;
    for (int k = 0; k <= tg.n_steps; ++k) ts.push_back(tg.t(k));
    std::vector<double> bound;
    for (double t : ts)
        bound.push_back(cfg.turnpike_C * (std::exp(-cfg.turnpike_mu * t) +
                                          std::exp(-cfg.turnpike_mu * (tg.T - t))));
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
        if (rep.ok[i]) fig2.add_line(ts, rep.reports[i].d, "eps=" + format_double(rep.epsilons[i]));
    if (rep.homogenized_ok) fig2.add_line(ts, rep.homogenized.d, "homogenized");
    fig2.add_line(ts, bound, "C(e^{-mu t}+e^{-mu(T-t)})", "#000000", true);
    fig2.write(run.artifact("fig2.svg"));

    // figure 1: state norms vs steady norms
    SvgPlot fig1("Evolutive and stationary state norms", "t", "||y(t)||", false);
    std::vector<NamedColumn> f1cols{{"t", ts}};
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
        if (!rep.ok[i]) continue;
        fig1.add_line(ts, rep.state_norms[i], "eps=" + format_double(rep.epsilons[i]));
        f1cols.push_back({"ynorm_eps_" + format_double(rep.epsilons[i]), rep.state_norms[i]});
        f1cols.push_back({"steady_eps_" + format_double(rep.epsilons[i]),
                          std::vector<double>(ts.size(), rep.steady_norms[i])});
    }
    if (rep.homogenized_ok) {
        fig1.add_line(ts, rep.homog_state_norms, "homogenized");
        f1cols.push_back({"ynorm_homog", rep.homog_state_norms});
    }
    write_columns_csv(run.artifact("fig1.csv"), f1cols);
    fig1.write(run.artifact("fig1.svg"));

    if (tube_files) {
        std::vector<NamedColumn> tcols{{"t", ts}, {"bound", rep.tube_bound}};
        SvgPlot fig4("Tubular neighborhood of the turnpike", "t", "||y(t)||", false);
        for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
            if (!rep.ok[i]) continue;
            tcols.push_back({"ynorm_eps_" + format_double(rep.epsilons[i]), rep.state_norms[i]});
            fig4.add_line(ts, rep.state_norms[i], "eps=" + format_double(rep.epsilons[i]));
        }
        fig4.add_line(ts, rep.tube_bound, "tube bound", "#000000", true);
        write_columns_csv(run.artifact("tube.csv"), tcols);
        fig4.write(run.artifact("fig4.svg"));
    }
}

json sweep_json(const SweepReport& rep) {
    json js;
    js["a_h"] = rep.a_h;
    js["gaps_trend_ok"] = rep.gaps_trend_ok;
    json entries = json::array();
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
        json e{{"epsilon", rep.epsilons[i]}, {"ok", rep.ok[i]}};
        if (rep.ok[i]) {
            e["report"] = report_json(rep.reports[i]);
            e["control_gap"] = rep.control_gap[i];
            e["state_gap"] = rep.state_gap[i];
            e["steady_gap"] = rep.steady_gap[i];
            e["tube_inside"] = rep.tube_inside[i];
        } else {
            e["error"] = rep.error[i];
        }
        entries.push_back(e);
    }
    js["entries"] = entries;
    js["homogenized_ok"] = rep.homogenized_ok;
    if (rep.homogenized_ok)
        js["homogenized"] = report_json(rep.homogenized);
    else
        js["homogenized_error"] = rep.homogenized_error;
    return js;
}

int run_sweep(Run& run, bool tube_mode) {
    const SweepReport rep = epsilon_sweep(run.cfg.sweep_setup());
    write_sweep_outputs(run, rep, run.cfg, tube_mode);
    run.write_json(tube_mode ? "tube.json" : "sweep.json", sweep_json(rep));
    bool all_ok = rep.homogenized_ok;
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
        all_ok = all_ok && rep.ok[i];
        if (!rep.ok[i])
            std::fprintf(stderr, "sweep: eps=%g failed: %s\n", rep.epsilons[i],
                         rep.error[i].c_str());
    }
    bool envelopes = all_ok && rep.homogenized.envelope.ok;
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
        envelopes = envelopes && rep.ok[i] && rep.reports[i].envelope.ok;
    run.note(std::string("sweep: envelopes ") + (envelopes ? "hold" : "VIOLATED") +
             ", gaps trend " + (rep.gaps_trend_ok ? "ok" : "BROKEN"));
    if (tube_mode) {
        bool inside = true;
        for (std::size_t i = 0; i < rep.epsilons.size(); ++i) inside = inside && rep.tube_inside[i];
        run.note(std::string("tube: all trajectories inside = ") + (inside ? "true" : "false"));
    }
    return all_ok ? 0 : 4;
}

int run_riccati(Run& run) {
    const ExperimentConfig& c = run.cfg;
    const Grid g = build_grid(c.riccati_n_cells);
    const TimeGrid tg(c.riccati_T, c.riccati_n_steps);
    const ControlWindow w = make_window(g, c.window_lo, c.window_hi);
    const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);

    json js;
    json gaps = json::array();
    std::vector<double> rates;
    for (double eps : c.riccati_epsilons) {
        CoefficientRecipe arec = c.a_recipe;
        arec.epsilon = eps;
        const DiscreteOperator A =
            assemble(sample_coefficients(arec, c.b_recipe, c.p_recipe, g, c.sampling), g, false);
        const RiccatiFamily fam = solve_dre(A, w, tg, DreScheme::lyapunov_implicit);
        const StationaryRiccati st = solve_are(A, w);
        const auto gap = riccati_gap(fam, st);
        std::vector<double> ts;
        for (int k = 0; k <= tg.n_steps; ++k) ts.push_back(tg.t(k));
        write_columns_csv(run.artifact("gap_eps_" + format_double(eps) + ".csv"),
                          {{"t", ts}, {"gap", gap}});
        const FitResult fit = fit_decay_rate(gap, tg, 0.0, tg.T / 2.0, c.gap_fit_floor);
        rates.push_back(fit.mu_hat);
        gaps.push_back(json{{"epsilon", eps},
                            {"fit", fit_json(fit)},
                            {"gap_at_0", gap.front()},
                            {"care_residual", st.care_residual}});
        run.note("riccati: eps " + std::to_string(eps) + " gap rate " + std::to_string(fit.mu_hat) +
                 " r2 " + std::to_string(fit.r2));
    }
    js["gap_decay"] = gaps;
    double rate_spread = 0.0;
    if (!rates.empty()) {
        const double lo = *std::min_element(rates.begin(), rates.end());
        const double hi = *std::max_element(rates.begin(), rates.end());
        rate_spread = (hi - lo) / hi;
    }
    js["rate_spread"] = rate_spread;

    // cross-method check: synthesized control vs direct optimization
    {
        ExperimentConfig cc = c;
        cc.n_cells = c.riccati_n_cells;
        cc.T = c.riccati_T;
        cc.n_steps = c.riccati_n_steps;
        const double eps = c.riccati_epsilons.front();
        OCPConfig ocp = cc.ocp_config(eps);
        const DiscreteOperator A = assemble(ocp.coeffs, ocp.grid, false);
        const RiccatiFamily fam = solve_dre(A, ocp.window, ocp.timegrid, DreScheme::transition);
        const SteadySolution st = solve_steady_ocp(ocp);
        const Trajectory h = solve_h_equation(A, ocp.window, fam, st.psi_bar);
        const OptimalSolution synth = synthesize_feedback(ocp, fam, st, h);
        const OptimalSolution cg = solve_evolutive_ocp(ocp);
        const double df = (synth.f.snaps - cg.f.snaps).norm() / cg.f.snaps.norm();
        const double dy = (synth.y.snaps - cg.y.snaps).norm() / cg.y.snaps.norm();
        js["feedback_crosscheck"] = json{{"epsilon", eps},
                                         {"rel_control_discrepancy", df},
                                         {"rel_state_discrepancy", dy},
                                         {"cost_synth", synth.cost},
                                         {"cost_cg", cg.cost}};
        run.note("riccati: synthesis vs CG discrepancy f " + std::to_string(df) + ", y " +
                 std::to_string(dy));
    }
    run.write_json("riccati.json", js);
    return 0;
}

int run_hum(Run& run) {
    const ExperimentConfig& c = run.cfg;
    const Grid g = build_grid(c.n_cells);
    const TimeGrid tg(c.hum_T, c.hum_n_steps);
    const ControlWindow w = make_window(g, c.hum_window_lo, c.hum_window_hi);
    Vec y0 = c.y0_recipe.sample(g);
    HumOptions opts;
    opts.cg_tol = c.hum_cg_tol;
    const HumSweep sweep = controllability_cost_sweep(c.a_recipe, c.hum_epsilons, g, w, y0, tg,
                                                      c.hum_delta, c.sampling, opts);
    // homogenized-problem reference cost for the boundedness comparison
    const double ah = homogenized_constant(c.a_recipe);
    const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
    const DiscreteOperator Ah =
        assemble(sample_coefficients(CoefficientRecipe::constant(ah), zero, zero, g), g, false);
    const HumResult homog = penalized_null_control(Ah, w, y0, tg, c.hum_delta, opts);

    std::vector<double> eps, del, cn, tn, ce;
    json entries = json::array();
    bool within_homog_factor = true;
    for (const auto& e : sweep.entries) {
        eps.push_back(e.epsilon);
        del.push_back(e.result.delta);
        cn.push_back(e.result.control_norm);
        tn.push_back(e.result.terminal_norm);
        ce.push_back(e.result.cost_estimate);
        const double vs_homog =
            homog.cost_estimate > 0.0 ? e.result.cost_estimate / homog.cost_estimate : 0.0;
        within_homog_factor = within_homog_factor && vs_homog <= 2.0;
        entries.push_back(json{{"epsilon", e.epsilon},
                               {"delta", e.result.delta},
                               {"control_norm", e.result.control_norm},
                               {"terminal_norm", e.result.terminal_norm},
                               {"cost_estimate", e.result.cost_estimate},
                               {"vs_homogenized", vs_homog},
                               {"iterations", e.result.iterations}});
    }
    write_columns_csv(run.artifact("hum.csv"), {{"epsilon", eps},
                                                {"delta", del},
                                                {"control_norm", cn},
                                                {"terminal_norm", tn},
                                                {"cost_estimate", ce}});
    const bool uniform = sweep.max_min_ratio <= 2.0;
    run.write_json("hum.json", json{{"entries", entries},
                                    {"max_min_ratio", sweep.max_min_ratio},
                                    {"uniformity_warning", !uniform},
                                    {"homogenized_cost_estimate", homog.cost_estimate},
                                    {"within_2x_homogenized", within_homog_factor}});
    if (!uniform)
        std::fprintf(stderr,
                     "hum: warning, cost ratio %.3f above the pilot threshold 2 "
                     "(theory claims boundedness only)\n",
                     sweep.max_min_ratio);
    run.note("hum: max/min cost ratio " + std::to_string(sweep.max_min_ratio));
    return 0;
}

int run_oracle(Run& run) {
    const auto outcomes = run_all_oracles(run.cfg.seed);
    json js = json::array();
    int failures = 0;
    std::printf("%-60s %-6s %-12s %-12s\n", "oracle", "state", "measured", "threshold");
    for (const auto& o : outcomes) {
        std::printf("%-60s %-6s %-12.3e %-12.3e %s\n", o.name.c_str(), o.pass ? "pass" : "FAIL",
                    o.measured, o.threshold, o.note.c_str());
        js.push_back(json{{"name", o.name},
                          {"pass", o.pass},
                          {"measured", o.measured},
                          {"threshold", o.threshold},
                          {"note", o.note}});
        if (!o.pass) ++failures;
    }
    run.write_json("oracle.json", js);
    std::printf("%d/%zu oracles passed\n", static_cast<int>(outcomes.size()) - failures,
                outcomes.size());
    return failures == 0 ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-horizon LQ control of the 1-d heat equation: turnpike, Riccati "
                 "decoupling, homogenization and controllability-cost studies"};
    app.set_version_flag("--version", kVersion);
    app.fallthrough();
    std::string config_path, out_override;
    int jobs = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "experiment config JSON")->check(CLI::ExistingFile);
    app.add_option("--out", out_override, "output directory (overrides config)");
    app.add_option("--jobs", jobs, "worker threads (default: TURNPIKE_LAB_JOBS or all cores)");
    app.add_flag("--quiet", quiet, "suppress progress output");

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"solve", "evolutive optimal control at a single epsilon"},
        {"steady", "stationary optimal control at a single epsilon"},
        {"riccati", "DRE/ARE gap decay and the feedback cross-check"},
        {"turnpike", "single-epsilon turnpike report"},
        {"sweep", "epsilon sweep with homogenized comparison (figures 1-2)"},
        {"tube", "tubular-neighborhood figure (figure 4)"},
        {"hum", "penalized-HUM controllability-cost sweep"},
        {"oracle", "run the oracle fixture table"},
    };
    for (const auto& [name, desc] : subs) app.add_subcommand(name, desc);
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (jobs <= 0)
        if (const char* env = std::getenv("TURNPIKE_LAB_JOBS")) jobs = std::atoi(env);
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#endif

    Run run;
    run.quiet = quiet;
    try {
        run.cfg = load_config(config_path.empty() ? std::filesystem::path{}
                                                  : std::filesystem::path(config_path));
        run.out = out_override.empty() ? run.cfg.output_dir : std::filesystem::path(out_override);
        std::filesystem::create_directories(run.out);
        run.manifest.version = kVersion;
        run.manifest.started_at = iso_now();
        run.manifest.config_sha256 =
            config_path.empty() ? std::string(64, '0') : sha256_hex_of_file(config_path);
        if (!config_path.empty()) {
            std::ifstream cf(config_path);
            json cj;
            cf >> cj;
            run.manifest.config_json = cj.dump(2);
        }
        run.manifest.subcommand = app.get_subcommands().front()->get_name();

        int rc = 0;
        const std::string sub = run.manifest.subcommand;
        if (sub == "solve") rc = run_solve(run);
        else if (sub == "steady") rc = run_steady(run);
        else if (sub == "riccati") rc = run_riccati(run);
        else if (sub == "turnpike") rc = run_turnpike(run);
        else if (sub == "sweep") rc = run_sweep(run, false);
        else if (sub == "tube") rc = run_sweep(run, true);
        else if (sub == "hum") rc = run_hum(run);
        else if (sub == "oracle") rc = run_oracle(run);
        run.finish();
        return rc;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", {{"message", e.what()}}}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 1;
    }
}
