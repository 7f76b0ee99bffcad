#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "turnpike/grid.hpp"

namespace turnpike {

/// Coefficient profile on (0,1). Periodic kinds describe a 1-periodic base
/// pattern sampled as base(x/epsilon); tabulated profiles are taken verbatim.
struct CoefficientRecipe {
    enum class Kind { constant, periodic_sin2, piecewise_periodic, tabulated };

    Kind kind = Kind::constant;
    std::map<std::string, double> params;   // constant: value; sin2: offset, amplitude
    std::vector<double> breakpoints;        // piecewise: 0=b0<..<bm=1; tabulated: abscissae
    std::vector<double> values;             // piecewise: cell values; tabulated: ordinates
    std::optional<double> epsilon;          // oscillation scale; nullopt = no scaling

    bool periodic() const { return kind != Kind::tabulated; }
    /// Value of the 1-periodic base pattern at s (constant/tabulated ignore periodicity).
    double base(double s) const;
    /// a(x) = base(x/epsilon) for periodic kinds, direct profile otherwise.
    double operator()(double x) const;
    /// Positions in (lo,hi) where the sampled profile jumps (piecewise kinds).
    std::vector<double> discontinuities(double lo, double hi) const;

    static CoefficientRecipe constant(double v);
    static CoefficientRecipe sin2(double offset, double amplitude = 1.0,
                                  std::optional<double> eps = std::nullopt);
};

struct SampleOptions {
    double quad_points_per_period = 32;  // composite-Simpson resolution of 1/a
    bool allow_underresolved = false;    // permit < 16 points per period
};

/// Sampled coefficients: a as harmonic averages over the interface-centered
/// cells [x_i, x_{i+1}], b and p pointwise at interior nodes.
struct CoefficientField {
    std::vector<double> a_interface;  // length n_cells
    std::vector<double> b_node;       // length n_cells-1
    std::vector<double> p_node;       // length n_cells-1
    double a0 = 0.0;                  // verified ellipticity floor
    std::optional<double> epsilon;
};

/// Characteristic-function control window chi_omega on [x_lo, x_hi].
struct ControlWindow {
    double x_lo = 0.0, x_hi = 1.0;
    std::vector<double> mask;      // 0/1 per interior node
    std::vector<int> indices;      // interior node indices inside the window
};

ControlWindow make_window(const Grid& g, double x_lo, double x_hi);

/// Harmonic cell averaging of a, pointwise sampling of b and p. Enforces the
/// ellipticity floor by dense sampling (1e4 * max(1, 1/eps) points) and
/// rejects under-resolved quadrature unless overridden.
CoefficientField sample_coefficients(const CoefficientRecipe& a,
                                     const CoefficientRecipe& b,
                                     const CoefficientRecipe& p, const Grid& g,
                                     const SampleOptions& opts = {});

/// Effective 1-d constant a_h = (int_0^1 1/a(s) ds)^-1, adaptive quadrature to
/// relative 1e-8. Rejects non-periodic or non-positive recipes.
double homogenized_constant(const CoefficientRecipe& a);

}  // namespace turnpike
