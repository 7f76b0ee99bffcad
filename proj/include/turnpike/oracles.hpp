#pragma once

#include <string>
#include <vector>

#include "turnpike/ocp.hpp"

namespace turnpike {

/// Brute-force solve of the full discrete optimality system (state rows,
/// adjoint rows, control eliminated by f = -chi psi) as one dense linear
/// system. Small instances only; this is the independent cross-check for the
/// iterative path.
struct DenseKktSolution {
    Mat y;    // columns y_1..y_M
    Mat psi;  // columns psi_0..psi_{M-1}
    Trajectory f;
};

DenseKktSolution solve_dense_kkt(const OCPConfig& cfg);

/// Dense normal-equations solve of the penalized HUM problem (small instances).
Trajectory solve_dense_hum(const DiscreteOperator& op, const ControlWindow& w, const Vec& y0,
                           const TimeGrid& tg, double delta);

struct OracleOutcome {
    std::string name;
    bool pass = false;
    double measured = 0.0;   // discrepancy or checked quantity
    double threshold = 0.0;
    std::string note;
};

/// Runs the oracle fixture table (closed forms, spectral formulas, dense
/// brute-force solves, finite differences) against the production solvers.
std::vector<OracleOutcome> run_all_oracles(unsigned long seed);

}  // namespace turnpike
