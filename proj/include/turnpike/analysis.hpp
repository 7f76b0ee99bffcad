#pragma once

#include <string>

#include "turnpike/ocp.hpp"

namespace turnpike {

/// Pointwise envelope check of d(t) against C (e^{-mu t} + e^{-mu (T-t)}).
/// `strict_ok` is the literal pointwise comparison; `ok` additionally allows a
/// solver-noise floor below which the bound is not enforceable in floating
/// point (mid-interval the exact bound drops to ~1e-43). `worst_margin` is
/// max d/bound over the indices where the bound exceeds the floor.
struct EnvelopeResult {
    double C = 0.0, mu = 0.0, floor = 1e-5;
    bool ok = false;
    bool strict_ok = false;
    double worst_margin = 0.0;
    bool raw_ok = false;  // same check with C scaled by (||y0|| + ||y_d||)
};

struct FitResult {
    double mu_hat = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n_points = 0;
};

struct TurnpikeReport {
    std::vector<double> d;          // deviation per time index
    EnvelopeResult envelope;
    FitResult fit;
    double integral_lhs = 0.0, integral_bound = 0.0;
    bool integral_ok = false;
    double mid_deviation = 0.0;     // d(T/2)
    double cost = 0.0;
    int iterations = 0;
};

std::vector<double> deviation_curve(const OptimalSolution& sol, const SteadySolution& steady,
                                    const Grid& g);

EnvelopeResult check_envelope(const std::vector<double>& d, double C, double mu,
                              const TimeGrid& tg, double norm_y0, double norm_yd,
                              double floor = 1e-5);

/// Least-squares fit of log d against t on [t_lo, t_hi], ignoring entries at
/// or below `floor`. Throws when fewer than three usable points remain.
FitResult fit_decay_rate(const std::vector<double>& d, const TimeGrid& tg, double t_lo,
                         double t_hi, double floor = 1e-14);

struct IntegralCheck {
    double lhs = 0.0, bound = 0.0;
    bool ok = false;
};

/// lhs = || (1/T) int y - ybar || + || (1/T) int f - fbar || with the scheme's
/// split quadrature; bound = 2 C (||y0|| + ||y_d||)(1 - e^{-mu T}) / (mu T).
IntegralCheck integral_turnpike_check(const OptimalSolution& sol, const SteadySolution& steady,
                                      double C, double mu, const Grid& g, double norm_yd);

struct TubeReport {
    std::vector<std::vector<double>> state_norms;  // ||y(t_k)|| per solution
    std::vector<double> bound;  // C (||y0||+||y_d||)(e^{-mu t} + e^{-mu (T-t)} + ||y_d||)
    std::vector<bool> inside;
};

/// Tubular-neighborhood data: every optimal trajectory's norm curve against
/// the common envelope set by the turnpike constants and the target norm.
TubeReport tubular_report(const std::vector<const OptimalSolution*>& sols, double C, double mu,
                          double norm_y0, double norm_yd, const Grid& g);

struct SweepSetup {
    Grid grid;
    TimeGrid timegrid;
    double window_lo = 0.0, window_hi = 1.0;
    CoefficientRecipe a_recipe;  // epsilon is overridden per sweep entry
    CoefficientRecipe b_recipe = CoefficientRecipe::constant(0.0);
    CoefficientRecipe p_recipe = CoefficientRecipe::constant(0.0);
    Vec y0, y_d;
    std::vector<double> epsilons;  // sorted descending
    double C = 10.0, mu = 4.0;
    double cg_tol = 1e-8;
    int cg_max_iter = 500;
    double envelope_floor = 1e-5;
    double fit_lo_frac = 0.05, fit_hi_frac = 0.4;
    double fit_floor = 1e-7;  // ~10x cg_tol: keeps the CG-noise plateau out of the fit
    SampleOptions sampling;
};

struct SweepReport {
    double a_h = 0.0;
    std::vector<double> epsilons;
    std::vector<bool> ok;                    // per-eps solve status
    std::vector<std::string> error;
    std::vector<TurnpikeReport> reports;     // per eps
    TurnpikeReport homogenized;
    bool homogenized_ok = false;
    std::string homogenized_error;
    std::vector<double> control_gap;         // ||f_eps - f_h||_{L2(0,T)}
    std::vector<double> state_gap;           // sup_t ||y_eps - y_h||
    std::vector<double> steady_gap;          // ||fbar_eps - fbar_h||
    bool gaps_trend_ok = false;              // decreasing, one non-monotone pair allowed
    std::vector<std::vector<double>> state_norms;  // ||y_eps(t_k)|| per eps
    std::vector<double> steady_norms;              // ||ybar_eps|| per eps
    double homog_steady_norm = 0.0;
    std::vector<double> homog_state_norms;
    std::vector<double> tube_bound;          // C (||y0||+||y_d||)(e^-mu t + e^-mu(T-t) + ||y_d||)
    std::vector<bool> tube_inside;
};

/// Solves steady + evolutive problems per epsilon and for the homogenized
/// constant, assembles turnpike reports, homogenization gaps and the tubular
/// figure data. Per-epsilon tasks run in parallel; a failing task is recorded
/// and the remaining entries are still produced.
SweepReport epsilon_sweep(const SweepSetup& setup);

}  // namespace turnpike
