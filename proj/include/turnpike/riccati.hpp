#pragma once

#include "turnpike/ocp.hpp"

namespace turnpike {

/// Time stepping for the backward matrix Riccati equation
///   E'(s) = I - A^T E - E A - E chi_omega E,   E(0) = 0,  s = time-to-go.
///
/// lyapunov_implicit: the linear Lyapunov part is implicit, the quadratic term
/// explicit. Its fixed point solves the continuous algebraic Riccati equation
/// exactly, so E(s) - E_hat decays to the round-off floor; used for the
/// operator-gap study.
///
/// transition: the exact Riccati recursion of the implicit-Euler optimality
/// system, P_k = (I+dt A^T)^-1 [ P_{k+1}(I + dt A + dt chi P_{k+1})^-1 + dt I ].
/// P_k maps y_k to psi_k of the discrete null-target problem to solver
/// precision at any dt; used for feedback synthesis.
enum class DreScheme { lyapunov_implicit, transition };

struct RiccatiFamily {
    TimeGrid tg;
    std::vector<Mat> P;  // P[k] ~ E(T - t_k); P[n_steps] = 0
    DreScheme scheme = DreScheme::lyapunov_implicit;
    double max_asymmetry = 0.0;  // max_k ||P-P^T||_F / ||P||_F observed before symmetrization
};

struct StationaryRiccati {
    Mat P_hat;
    Mat closed_loop;        // M = A + chi_omega E_hat
    double care_residual = 0.0;  // ||A^T X + X A + X chi X - I||_F
    int iterations = 0;
};

enum class AreMethod { sign_function, dre_stationarity };

/// Dense-guard: rejects n interior unknowns above 401.
RiccatiFamily solve_dre(const DiscreteOperator& op, const ControlWindow& w, const TimeGrid& tg,
                        DreScheme scheme = DreScheme::lyapunov_implicit,
                        Exec ex = default_exec());

/// Stationary Riccati operator. sign_function runs the scaled matrix-sign
/// iteration on the Hamiltonian and polishes with large-step Lyapunov-implicit
/// DRE iterations (whose fixed point is the exact CARE solution);
/// dre_stationarity integrates the DRE with a growing step until
/// ||P_k - P_{k-1}||_F / dt <= 1e-12. Both enforce care_residual <= 1e-10.
StationaryRiccati solve_are(const DiscreteOperator& op, const ControlWindow& w,
                            AreMethod method = AreMethod::sign_function,
                            Exec ex = default_exec());

/// Backward equation -h_t + (A* + chi_omega E(T-t)) h = 0, h(T) = -psi_bar.
/// For a transition family the step is the exact affine remainder of the
/// discrete optimality system; for lyapunov_implicit the stiff A* part is
/// implicit and the bounded reaction term explicit.
Trajectory solve_h_equation(const DiscreteOperator& op, const ControlWindow& w,
                            const RiccatiFamily& fam, const Vec& psi_bar);

/// Closed-loop integration of the affine feedback law
///   f(t) = f_bar - chi_omega [ E(T-t)(y - y_bar) + h(t) ].
OptimalSolution synthesize_feedback(const OCPConfig& cfg, const RiccatiFamily& fam,
                                    const SteadySolution& steady, const Trajectory& h);

/// g_k = || E(t_k) - E_hat ||  (spectral norm; the dx weighting of the L2
/// geometry cancels on the uniform mesh).
std::vector<double> riccati_gap(const RiccatiFamily& fam, const StationaryRiccati& stat,
                                Exec ex = default_exec());

}  // namespace turnpike
