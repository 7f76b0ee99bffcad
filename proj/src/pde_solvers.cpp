#include "turnpike/pde_solvers.hpp"

namespace turnpike {

Trajectory solve_forward(const DiscreteOperator& op, const Vec& y0, const Trajectory* source,
                         const TimeGrid& tg) {
    const int n = op.n();
    if (static_cast<int>(y0.size()) != n)
        throw std::invalid_argument("solve_forward: y0 dimension mismatch");
    if (source) source->require_matches(tg, "solve_forward");

    const TridiagFactor F = shifted_factor(op, 1.0, tg.dt);
    Trajectory y(tg, n);
    y.col(0) = y0;
    Vec rhs(n);
    for (int k = 0; k < tg.n_steps; ++k) {
        rhs = y.col(k);
        if (source) rhs += tg.dt * source->col(k + 1);
        tridiag_solve_inplace(F, rhs.data());
        y.col(k + 1) = rhs;
    }
    return y;
}

Trajectory solve_backward(const DiscreteOperator& op_adj, const Vec& terminal,
                          const Trajectory* source, const TimeGrid& tg) {
    const int n = op_adj.n();
    if (static_cast<int>(terminal.size()) != n)
        throw std::invalid_argument("solve_backward: terminal dimension mismatch");
    if (source) source->require_matches(tg, "solve_backward");

    const TridiagFactor F = shifted_factor(op_adj, 1.0, tg.dt);
    Trajectory psi(tg, n);
    psi.col(tg.n_steps) = terminal;
    Vec rhs(n);
    for (int k = tg.n_steps - 1; k >= 0; --k) {
        rhs = psi.col(k + 1);
        if (source) rhs += tg.dt * source->col(k);
        tridiag_solve_inplace(F, rhs.data());
        psi.col(k) = rhs;
    }
    return psi;
}

}  // namespace turnpike
