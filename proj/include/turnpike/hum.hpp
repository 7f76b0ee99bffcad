#pragma once

#include "turnpike/pde_solvers.hpp"

namespace turnpike {

struct HumResult {
    Trajectory control;
    double terminal_norm = 0.0;   // ||y(T)||
    double control_norm = 0.0;    // ||f||_{L2(0,T;omega)}
    double delta = 0.0;
    double cost_estimate = 0.0;   // control_norm / ||y0||
    int iterations = 0;
};

struct HumOptions {
    double cg_tol = 1e-10;
    int cg_max_iter = 4000;
};

/// Penalized HUM control: minimizes 1/2 ||f||^2 + 1/(2 delta) ||y(T)||^2 by
/// conjugate gradients on the reduced normal equations through the
/// exactly-adjoint forward/backward pair.
HumResult penalized_null_control(const DiscreteOperator& op, const ControlWindow& w,
                                 const Vec& y0, const TimeGrid& tg, double delta,
                                 const HumOptions& opts = {});

struct HumSweepEntry {
    double epsilon = 0.0;
    HumResult result;
};

struct HumSweep {
    std::vector<HumSweepEntry> entries;
    double max_min_ratio = 0.0;
};

/// Controllability-cost probe: fixed y0, window, horizon and delta across the
/// epsilon family; reports per-epsilon cost estimates and their max/min ratio.
HumSweep controllability_cost_sweep(const CoefficientRecipe& a_recipe,
                                    const std::vector<double>& epsilons, const Grid& g,
                                    const ControlWindow& w, const Vec& y0, const TimeGrid& tg,
                                    double delta, const SampleOptions& sampling = {},
                                    const HumOptions& opts = {});

}  // namespace turnpike
