#pragma once

#include "turnpike/operators.hpp"
#include "turnpike/time_grid.hpp"

namespace turnpike {

/// Implicit Euler for y_t + A y = source, y(0) = y0:
///   (I + dt A) y_{k+1} = y_k + dt source_{k+1}.
/// The source is sampled at the implicit (new) level; nullptr means zero.
Trajectory solve_forward(const DiscreteOperator& op, const Vec& y0,
                         const Trajectory* source, const TimeGrid& tg);

/// Implicit Euler backwards for -psi_t + A* psi = source, psi(T) = terminal:
///   (I + dt A*) psi_k = psi_{k+1} + dt source_k,   k = n_steps-1 .. 0.
/// With the transposed operator this is the exact adjoint of solve_forward
/// under the dt*dx pairing: sum_{k=0}^{M-1} dt (g_k, y_k) = sum_{k=1}^{M} dt (f_k, chi psi_k).
Trajectory solve_backward(const DiscreteOperator& op_adj, const Vec& terminal,
                          const Trajectory* source, const TimeGrid& tg);

}  // namespace turnpike
