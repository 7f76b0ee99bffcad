#include "turnpike/hum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "turnpike/ocp.hpp"

namespace turnpike {

HumResult penalized_null_control(const DiscreteOperator& op, const ControlWindow& w,
                                 const Vec& y0, const TimeGrid& tg, double delta,
                                 const HumOptions& opts) {
    if (!(delta > 0.0)) throw std::invalid_argument("penalized_null_control: delta must be > 0");
    const int n = op.n();
    const int M = tg.n_steps;
    const TridiagFactor F = shifted_factor(op, 1.0, tg.dt);
    const TridiagFactor Ft = shifted_factor(op.transpose(), 1.0, tg.dt);

    // terminal state map: U (cols f_1..f_M) -> y(T)
    auto terminal_of = [&](const Mat& U, bool with_y0) {
        Vec y = with_y0 ? y0 : Vec(Vec::Zero(n));
        for (int k = 0; k < M; ++k) {
            if (U.size())
                for (int i = 0; i < n; ++i)
                    y[i] += tg.dt * w.mask[static_cast<std::size_t>(i)] * U(i, k);
            tridiag_solve_inplace(F, y.data());
        }
        return y;
    };
    // adjoint of the terminal map under the dt*dx control pairing
    auto lstar = [&](const Vec& eta) {
        Mat out(n, M);
        Vec z = eta;
        for (int k = M - 1; k >= 0; --k) {
            tridiag_solve_inplace(Ft, z.data());
            for (int i = 0; i < n; ++i) out(i, k) = w.mask[static_cast<std::size_t>(i)] * z[i];
        }
        return out;
    };
    auto hmul = [&](const Mat& U) -> Mat { return U + (1.0 / delta) * lstar(terminal_of(U, false)); };

    Mat rhs = -(1.0 / delta) * lstar(terminal_of(Mat(), true));
    const std::int64_t len = static_cast<std::int64_t>(n) * M;
    auto dotf = [&](const Mat& X, const Mat& Y) { return dot(X.data(), Y.data(), len); };

    Mat U = Mat::Zero(n, M);
    Mat r = rhs, d = rhs;
    const double rr0 = dotf(r, r);
    double rr = rr0;
    int it = 0;
    if (rr0 > 0.0) {
        while (std::sqrt(rr / rr0) > opts.cg_tol) {
            if (it >= opts.cg_max_iter)
                throw std::runtime_error("penalized_null_control: cg_max_iter reached, residual " +
                                         std::to_string(std::sqrt(rr / rr0)));
            const Mat Hd = hmul(d);
            const double alpha = rr / dotf(d, Hd);
            U += alpha * d;
            r -= alpha * Hd;
            const double rr_new = dotf(r, r);
            d = r + (rr_new / rr) * d;
            rr = rr_new;
            ++it;
        }
    }

    HumResult res;
    res.delta = delta;
    res.iterations = it;
    res.control = Trajectory(tg, n);
    res.control.snaps.rightCols(M) = U;
    const Grid& g = op.grid;
    res.control_norm = l2t_norm(res.control, g);
    res.terminal_norm = l2_norm(terminal_of(U, true), g);
    const double ny0 = l2_norm(y0, g);
    res.cost_estimate = ny0 > 0.0 ? res.control_norm / ny0 : 0.0;
    return res;
}

HumSweep controllability_cost_sweep(const CoefficientRecipe& a_recipe,
                                    const std::vector<double>& epsilons, const Grid& g,
                                    const ControlWindow& w, const Vec& y0, const TimeGrid& tg,
                                    double delta, const SampleOptions& sampling,
                                    const HumOptions& opts) {
    HumSweep sweep;
    const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
    for (double eps : epsilons) {
        CoefficientRecipe arec = a_recipe;
        arec.epsilon = eps;
        const CoefficientField coeffs = sample_coefficients(arec, zero, zero, g, sampling);
        const DiscreteOperator op = assemble(coeffs, g, false);
        HumSweepEntry e;
        e.epsilon = eps;
        e.result = penalized_null_control(op, w, y0, tg, delta, opts);
        sweep.entries.push_back(std::move(e));
    }
    double lo = 0.0, hi = 0.0;
    for (const auto& e : sweep.entries) {
        const double c = e.result.cost_estimate;
        if (lo == 0.0 || c < lo) lo = c;
        if (c > hi) hi = c;
    }
    sweep.max_min_ratio = lo > 0.0 ? hi / lo : 0.0;
    return sweep;
}

}  // namespace turnpike
