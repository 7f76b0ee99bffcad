#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "turnpike/coefficients.hpp"

using namespace turnpike;

TEST_CASE("build_grid produces the uniform Dirichlet mesh") {
    const Grid g = build_grid(4);
    REQUIRE(g.nodes.size() == 5);
    CHECK(g.nodes[0] == 0.0);
    CHECK(g.nodes[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.nodes[4] == 1.0);
    CHECK(g.dx * g.n_cells == doctest::Approx(1.0).epsilon(1e-15));

    const Grid fine = build_grid(421);
    CHECK(fine.dx == doctest::Approx(1.0 / 421).epsilon(1e-15));
    CHECK(fine.n_interior() == 420);

    CHECK_THROWS_AS((void)build_grid(3), std::invalid_argument);
}

TEST_CASE("constant coefficient samples to constant interface values") {
    const Grid g = build_grid(17);
    const auto f = sample_coefficients(CoefficientRecipe::constant(2.0),
                                       CoefficientRecipe::constant(0.0),
                                       CoefficientRecipe::constant(0.0), g);
    for (double a : f.a_interface) CHECK(a == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(f.a0 == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("harmonic interface averages reach the homogenized limit as eps -> 0") {
    const Grid g = build_grid(50);
    CoefficientRecipe a = CoefficientRecipe::sin2(0.5);
    a.epsilon = 0.001;
    const auto f = sample_coefficients(a, CoefficientRecipe::constant(0.0),
                                       CoefficientRecipe::constant(0.0), g);
    for (double ai : f.a_interface)
        CHECK(ai == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("ellipticity violations are rejected") {
    CoefficientRecipe a;  // a(x) = x - 1 <= 0 on (0,1)
    a.kind = CoefficientRecipe::Kind::tabulated;
    a.breakpoints = {0.0, 1.0};
    a.values = {-1.0, 0.0};
    const Grid g = build_grid(8);
    CHECK_THROWS_WITH_AS(
        (void)sample_coefficients(a, CoefficientRecipe::constant(0.0),
                                  CoefficientRecipe::constant(0.0), g),
        doctest::Contains("ellipticity"), std::invalid_argument);
}

TEST_CASE("under-resolved quadrature is an error unless overridden") {
    const Grid g = build_grid(8);
    CoefficientRecipe a = CoefficientRecipe::sin2(0.5);
    a.epsilon = 0.01;
    SampleOptions opts;
    opts.quad_points_per_period = 8;
    CHECK_THROWS_AS((void)sample_coefficients(a, CoefficientRecipe::constant(0.0),
                                              CoefficientRecipe::constant(0.0), g, opts),
                    std::invalid_argument);
    opts.allow_underresolved = true;
    CHECK_NOTHROW((void)sample_coefficients(a, CoefficientRecipe::constant(0.0),
                                            CoefficientRecipe::constant(0.0), g, opts));
}

TEST_CASE("harmonic cell averaging is exact for piecewise-constant recipes") {
    CoefficientRecipe a;
    a.kind = CoefficientRecipe::Kind::piecewise_periodic;
    a.breakpoints = {0.0, 0.5, 1.0};
    a.values = {1.0, 3.0};
    a.epsilon = 1.0;  // one period across the domain
    const Grid g = build_grid(4);
    const auto f = sample_coefficients(a, CoefficientRecipe::constant(0.0),
                                       CoefficientRecipe::constant(0.0), g);
    // first two cells sit entirely in the a=1 half, last two in a=3
    CHECK(f.a_interface[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.a_interface[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.a_interface[2] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(f.a_interface[3] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("sampling is deterministic") {
    const Grid g = build_grid(33);
    CoefficientRecipe a = CoefficientRecipe::sin2(0.5);
    a.epsilon = 0.05;
    const auto f1 = sample_coefficients(a, CoefficientRecipe::constant(0.3),
                                        CoefficientRecipe::constant(-0.2), g);
    const auto f2 = sample_coefficients(a, CoefficientRecipe::constant(0.3),
                                        CoefficientRecipe::constant(-0.2), g);
    CHECK(f1.a_interface == f2.a_interface);
    CHECK(f1.b_node == f2.b_node);
    CHECK(f1.p_node == f2.p_node);
}

TEST_CASE("homogenized constant: closed forms") {
    CHECK(homogenized_constant(CoefficientRecipe::constant(2.0)) ==
          doctest::Approx(2.0).epsilon(1e-12));

    const double ah = homogenized_constant(CoefficientRecipe::sin2(0.5));
    CHECK(std::abs(ah - 0.86603) <= 1e-4);  // reported effective constant
    CHECK(ah == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-8));

    CoefficientRecipe pw;
    pw.kind = CoefficientRecipe::Kind::piecewise_periodic;
    pw.breakpoints = {0.0, 0.5, 1.0};
    pw.values = {1.0, 3.0};
    CHECK(homogenized_constant(pw) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("homogenized constant rejects non-periodic and non-positive recipes") {
    CoefficientRecipe t;
    t.kind = CoefficientRecipe::Kind::tabulated;
    t.breakpoints = {0.0, 1.0};
    t.values = {1.0, 2.0};
    CHECK_THROWS_AS((void)homogenized_constant(t), std::invalid_argument);
    CHECK_THROWS_AS((void)homogenized_constant(CoefficientRecipe::sin2(0.0)),
                    std::invalid_argument);
}

TEST_CASE("harmonic mean never exceeds the arithmetic mean") {
    auto arithmetic = [](const CoefficientRecipe& r) {
        double s = 0.0;
        const int m = 20000;
        for (int k = 0; k < m; ++k) s += r.base((k + 0.5) / m);
        return s / m;
    };
    std::vector<CoefficientRecipe> recipes{CoefficientRecipe::constant(0.7),
                                           CoefficientRecipe::sin2(0.5),
                                           CoefficientRecipe::sin2(1.3, 2.0)};
    CoefficientRecipe pw;
    pw.kind = CoefficientRecipe::Kind::piecewise_periodic;
    pw.breakpoints = {0.0, 0.25, 0.8, 1.0};
    pw.values = {2.0, 0.5, 4.0};
    recipes.push_back(pw);
    for (const auto& r : recipes)
        CHECK(homogenized_constant(r) <= arithmetic(r) * (1.0 + 1e-12));
}

TEST_CASE("control window mask marks exactly the nodes in [x_lo, x_hi]") {
    const Grid g = build_grid(10);
    const ControlWindow w = make_window(g, 0.3, 0.7);
    for (int i = 0; i < g.n_interior(); ++i) {
        const double x = g.xi(i + 1);
        CHECK(w.mask[static_cast<std::size_t>(i)] == ((x >= 0.3 && x <= 0.7) ? 1.0 : 0.0));
    }
    CHECK_THROWS_AS((void)make_window(g, 0.7, 0.3), std::invalid_argument);
    CHECK_THROWS_AS((void)make_window(g, 0.301, 0.349), std::invalid_argument);  // no node inside
}
