#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "turnpike/hum.hpp"
#include "turnpike/oracles.hpp"

using namespace turnpike;

namespace {

DiscreteOperator make_op(const Grid& g, double eps) {
    CoefficientRecipe a = CoefficientRecipe::sin2(0.5);
    a.epsilon = eps;
    const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
    return assemble(sample_coefficients(a, zero, zero, g), g, false);
}

Vec parabola(const Grid& g) {
    Vec v(g.n_interior());
    for (int i = 0; i < g.n_interior(); ++i) {
        const double x = g.xi(i + 1);
        v[i] = x * (x - 1.0);
    }
    return v;
}

}  // namespace

TEST_CASE("zero initial state needs no control") {
    const Grid g = build_grid(24);
    const DiscreteOperator A = make_op(g, 1.0);
    const HumResult r = penalized_null_control(A, make_window(g, 0.3, 0.7),
                                               Vec::Zero(g.n_interior()), TimeGrid(1.0, 20), 1e-6);
    CHECK(r.control_norm == 0.0);
    CHECK(r.terminal_norm == 0.0);
    CHECK(r.iterations == 0);
    CHECK_THROWS_AS((void)penalized_null_control(A, make_window(g, 0.3, 0.7),
                                                 Vec::Zero(g.n_interior()), TimeGrid(1.0, 20), 0.0),
                    std::invalid_argument);
}

TEST_CASE("full-window control drives the first mode far below free decay") {
    const Grid g = build_grid(80);
    const CoefficientRecipe one = CoefficientRecipe::constant(1.0);
    const CoefficientRecipe zero = CoefficientRecipe::constant(0.0);
    const DiscreteOperator A = assemble(sample_coefficients(one, zero, zero, g), g, false);
    Vec y0(g.n_interior());
    for (int i = 0; i < g.n_interior(); ++i) y0[i] = std::sin(M_PI * g.xi(i + 1));
    const HumResult r =
        penalized_null_control(A, make_window(g, 0.0, 1.0), y0, TimeGrid(1.0, 100), 1e-6);
    CHECK(r.terminal_norm <= 1e-3 * l2_norm(y0, g));
}

TEST_CASE("CG control matches the dense normal-equations solve on the tiny instance") {
    const Grid g = build_grid(9);
    const DiscreteOperator A = make_op(g, 0.3);
    const ControlWindow w = make_window(g, 0.3, 0.7);
    const TimeGrid tg(1.0, 8);
    const Vec y0 = parabola(g);
    const HumOptions opts{1e-13, 5000};
    const HumResult r = penalized_null_control(A, w, y0, tg, 1e-4, opts);
    const Trajectory fd = solve_dense_hum(A, w, y0, tg, 1e-4);
    CHECK((r.control.snaps - fd.snaps).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("delta ladder: terminal norm falls, control norm grows to its limit") {
    const Grid g = build_grid(60);
    const DiscreteOperator A = make_op(g, 0.5);
    const ControlWindow w = make_window(g, 0.3, 0.7);
    const TimeGrid tg(1.0, 60);
    const Vec y0 = parabola(g);
    double prev_t = 1e300, prev_c = -1.0;
    for (double delta : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
        const HumResult r = penalized_null_control(A, w, y0, tg, delta);
        CHECK(r.terminal_norm <= prev_t * (1.0 + 1e-9));
        CHECK(r.control_norm >= prev_c * (1.0 - 1e-9));
        prev_t = r.terminal_norm;
        prev_c = r.control_norm;
    }
}

TEST_CASE("controllability cost is nonincreasing in the horizon") {
    const Grid g = build_grid(60);
    const DiscreteOperator A = make_op(g, 0.5);
    const ControlWindow w = make_window(g, 0.3, 0.7);
    const Vec y0 = parabola(g);
    double prev = 1e300;
    for (double T : {0.5, 1.0, 2.0}) {
        const HumResult r =
            penalized_null_control(A, w, y0, TimeGrid(T, static_cast<int>(60 * T)), 1e-6);
        CHECK(r.cost_estimate <= prev * (1.0 + 1e-9));
        prev = r.cost_estimate;
    }
}

TEST_CASE("cost sweep over a constant recipe is flat") {
    const Grid g = build_grid(40);
    const TimeGrid tg(1.0, 40);
    const ControlWindow w = make_window(g, 0.3, 0.7);
    const HumSweep sweep = controllability_cost_sweep(
        CoefficientRecipe::constant(1.0), {1.0, 0.1, 0.01}, g, w, parabola(g), tg, 1e-6);
    REQUIRE(sweep.entries.size() == 3);
    CHECK(sweep.max_min_ratio == doctest::Approx(1.0).epsilon(1e-9));
}
