#pragma once

#include "turnpike/pde_solvers.hpp"

namespace turnpike {

/// Evolutive LQ problem
///   min J(f) = 1/2 int_0^T ( ||f||^2 + ||y(f) - y_d||^2 ) dt
/// discretized with the implicit-Euler pair from pde_solvers. The discrete
/// quadrature matches the scheme exactly: the control enters at indices
/// 1..n_steps (right rule), the state mismatch at 0..n_steps-1 (left rule),
/// which makes reduced_gradient the exact gradient of evaluate_cost.
struct OCPConfig {
    Grid grid;
    TimeGrid timegrid;
    CoefficientField coeffs;
    ControlWindow window;
    Vec y0;
    Vec y_d;  // time-independent target
    double cg_tol = 1e-8;
    int cg_max_iter = 500;
};

struct OptimalSolution {
    Trajectory y, f, psi;
    double cost = 0.0;
    int iterations = 0;
    double grad_norm = 0.0;  // final relative gradient norm
};

struct SteadySolution {
    Vec y_bar, f_bar, psi_bar;
    double cost = 0.0;
};

/// sqrt( sum_{k=1}^{M} dt ||u_k||^2 ), the L2(0,T) control norm of the scheme.
double l2t_norm(const Trajectory& u, const Grid& g);

double evaluate_cost(const Trajectory& f, const OCPConfig& cfg);

/// f + chi_omega psi(f), with psi the backward solve driven by y(f) - y_d and
/// zero terminal state. Index 0 is reported but carries no cost weight.
Trajectory reduced_gradient(const Trajectory& f, const OCPConfig& cfg);

/// Conjugate gradients on the reduced normal equations (I + L*L) f = -L*(y_hom - y_d).
/// Terminates at relative gradient norm <= cg_tol; throws when the iteration
/// cap is reached (final residual in the message).
OptimalSolution solve_evolutive_ocp(const OCPConfig& cfg);

/// Coupled stationary optimality system
///   A ybar + chi_omega psibar = 0,   A* psibar - ybar = -y_d
/// solved as one banded system (bandwidth 2, interleaved unknowns); then
/// fbar = -chi_omega psibar exactly.
SteadySolution solve_steady_ocp(const OCPConfig& cfg);

}  // namespace turnpike
