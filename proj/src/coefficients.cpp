#include "turnpike/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace turnpike {

namespace {

double param(const std::map<std::string, double>& m, const std::string& key,
             const double* fallback = nullptr) {
    auto it = m.find(key);
    if (it != m.end()) return it->second;
    if (fallback) return *fallback;
    throw std::invalid_argument("coefficient recipe: missing parameter '" + key + "'");
}

double wrap_unit(double s) {
    double r = s - std::floor(s);
    if (r >= 1.0) r = 0.0;  // guard against floor rounding
    return r;
}

}  // namespace

CoefficientRecipe CoefficientRecipe::constant(double v) {
    CoefficientRecipe r;
    r.kind = Kind::constant;
    r.params["value"] = v;
    return r;
}

CoefficientRecipe CoefficientRecipe::sin2(double offset, double amplitude,
                                          std::optional<double> eps) {
    CoefficientRecipe r;
    r.kind = Kind::periodic_sin2;
    r.params["offset"] = offset;
    r.params["amplitude"] = amplitude;
    r.epsilon = eps;
    return r;
}

double CoefficientRecipe::base(double s) const {
    switch (kind) {
        case Kind::constant:
            return param(params, "value");
        case Kind::periodic_sin2: {
            const double one = 1.0;
            const double amp = param(params, "amplitude", &one);
            const double off = param(params, "offset");
            const double sn = std::sin(M_PI * s);
            return amp * sn * sn + off;
        }
        case Kind::piecewise_periodic: {
            if (breakpoints.size() != values.size() + 1 || values.empty())
                throw std::invalid_argument(
                    "piecewise_periodic recipe needs breakpoints = values.size()+1");
            const double r = wrap_unit(s);
            auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), r);
            std::size_t j = static_cast<std::size_t>(it - breakpoints.begin());
            if (j == 0) j = 1;
            if (j > values.size()) j = values.size();
            return values[j - 1];
        }
        case Kind::tabulated: {
            if (breakpoints.size() != values.size() || values.size() < 2)
                throw std::invalid_argument("tabulated recipe needs matching abscissae/values");
            if (s <= breakpoints.front()) return values.front();
            if (s >= breakpoints.back()) return values.back();
            auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
            const std::size_t j = static_cast<std::size_t>(it - breakpoints.begin());
            const double t = (s - breakpoints[j - 1]) / (breakpoints[j] - breakpoints[j - 1]);
            return values[j - 1] + t * (values[j] - values[j - 1]);
        }
    }
    throw std::logic_error("unreachable recipe kind");
}

double CoefficientRecipe::operator()(double x) const {
    if (!periodic()) return base(x);
    const double eps = epsilon.value_or(1.0);
    return base(x / eps);
}

std::vector<double> CoefficientRecipe::discontinuities(double lo, double hi) const {
    std::vector<double> out;
    const double eps = epsilon.value_or(1.0);
    auto push_scaled = [&](double b) {
        // jump locations x = eps * (k + b) inside (lo, hi)
        const long k0 = static_cast<long>(std::floor(lo / eps - b)) - 1;
        const long k1 = static_cast<long>(std::ceil(hi / eps - b)) + 1;
        for (long k = k0; k <= k1; ++k) {
            const double x = eps * (static_cast<double>(k) + b);
            if (x > lo && x < hi) out.push_back(x);
        }
    };
    if (kind == Kind::piecewise_periodic) {
        for (double b : breakpoints)
            if (b < 1.0) push_scaled(b);
    } else if (kind == Kind::tabulated) {
        for (double b : breakpoints)
            if (b > lo && b < hi) out.push_back(b);  // interpolation kinks
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

/// Composite Simpson of f over [lo, hi] split at the recipe's jump points.
/// Panel endpoints are nudged inward so one-sided limits are sampled at the
/// jumps; this keeps the rule exact on piecewise-constant pieces.
template <class F>
double integrate_cellwise(const CoefficientRecipe& r, F&& f, double lo, double hi,
                          double points_per_period) {
    std::vector<double> cuts{lo};
    for (double d : r.discontinuities(lo, hi)) cuts.push_back(d);
    cuts.push_back(hi);
    const double eps = r.periodic() ? r.epsilon.value_or(1.0) : 1.0;
    double total = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c], b = cuts[c + 1], len = b - a;
        if (len <= 0.0) continue;
        int np = std::max(4, static_cast<int>(std::ceil(points_per_period * len / (2.0 * eps))));
        const double h = len / (2 * np);
        const double nudge = 1e-9 * len;
        double s = f(a + nudge) + f(b - nudge);
        for (int i = 1; i < 2 * np; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
        total += s * h / 3.0;
    }
    return total;
}

template <class F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, int force) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // `force` levels always split: symmetric or periodic integrands can fool
    // the first error estimates with an exactly vanishing delta.
    if (force <= 0 && (depth <= 0 || std::abs(delta) <= 15.0 * tol))
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, force - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, force - 1);
}

template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48, 6);
}

}  // namespace

ControlWindow make_window(const Grid& g, double x_lo, double x_hi) {
    if (!(x_lo >= 0.0 && x_lo < x_hi && x_hi <= 1.0))
        throw std::invalid_argument("control window requires 0 <= x_lo < x_hi <= 1");
    ControlWindow w;
    w.x_lo = x_lo;
    w.x_hi = x_hi;
    const int n = g.n_interior();
    w.mask.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = g.xi(i + 1);
        if (x >= x_lo && x <= x_hi) {
            w.mask[static_cast<std::size_t>(i)] = 1.0;
            w.indices.push_back(i);
        }
    }
    if (w.indices.empty())
        throw std::invalid_argument("control window contains no interior node");
    return w;
}

CoefficientField sample_coefficients(const CoefficientRecipe& a, const CoefficientRecipe& b,
                                     const CoefficientRecipe& p, const Grid& g,
                                     const SampleOptions& opts) {
    if (opts.quad_points_per_period < 16.0 && !opts.allow_underresolved)
        throw std::invalid_argument(
            "sample_coefficients: fewer than 16 quadrature points per epsilon-period "
            "(set allow_underresolved to override)");

    CoefficientField f;
    f.epsilon = a.epsilon;
    const int N = g.n_cells;
    f.a_interface.resize(static_cast<std::size_t>(N));
    if (a.kind == CoefficientRecipe::Kind::constant) {
        // exact harmonic mean; keeps pure-diffusion assembly exactly symmetric
        std::fill(f.a_interface.begin(), f.a_interface.end(), a.base(0.0));
    } else {
        for (int i = 0; i < N; ++i) {
            const double xl = g.xi(i), xr = g.xi(i + 1);
            const double integ = integrate_cellwise(
                a, [&](double x) { return 1.0 / a(x); }, xl, xr, opts.quad_points_per_period);
            f.a_interface[static_cast<std::size_t>(i)] = (xr - xl) / integ;
        }
    }

    const int n = g.n_interior();
    f.b_node.resize(static_cast<std::size_t>(n));
    f.p_node.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        f.b_node[static_cast<std::size_t>(i)] = b(g.xi(i + 1));
        f.p_node[static_cast<std::size_t>(i)] = p(g.xi(i + 1));
        if (!std::isfinite(f.b_node[static_cast<std::size_t>(i)]) ||
            !std::isfinite(f.p_node[static_cast<std::size_t>(i)]))
            throw std::invalid_argument("sample_coefficients: unbounded b or p sample");
    }

    // Ellipticity floor (1.4) by dense sampling.
    const double eps = a.epsilon.value_or(1.0);
    const long nsamp =
        std::min(4'000'000L, static_cast<long>(1e4 * std::max(1.0, 1.0 / eps)));
    double amin = f.a_interface[0];
    for (double ai : f.a_interface) amin = std::min(amin, ai);
    for (long k = 0; k <= nsamp; ++k) amin = std::min(amin, a(static_cast<double>(k) / nsamp));
    if (!(amin > 0.0))
        throw std::invalid_argument("sample_coefficients: ellipticity violation, min sampled a = " +
                                    std::to_string(amin));
    f.a0 = amin;
    return f;
}

double homogenized_constant(const CoefficientRecipe& a) {
    if (!a.periodic())
        throw std::invalid_argument("homogenized_constant: recipe is not periodic");
    // positivity of the base pattern over one period
    double amin = a.base(0.0);
    for (int k = 0; k <= 20000; ++k) amin = std::min(amin, a.base(k / 20000.0));
    if (!(amin > 0.0))
        throw std::invalid_argument("homogenized_constant: non-positive recipe");

    std::vector<double> cuts{0.0};
    if (a.kind == CoefficientRecipe::Kind::piecewise_periodic)
        for (double b : a.breakpoints)
            if (b > 0.0 && b < 1.0) cuts.push_back(b);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());

    double integ = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
        integ += integrate_adaptive([&](double s) { return 1.0 / a.base(s); }, cuts[c],
                                    cuts[c + 1], 1e-9 * (cuts[c + 1] - cuts[c]));
    return 1.0 / integ;
}

}  // namespace turnpike
