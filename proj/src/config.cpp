#include "turnpike/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace turnpike {

using nlohmann::json;

double FunctionRecipe::operator()(double x) const {
    switch (kind) {
        case Kind::constant:
            return value;
        case Kind::poly: {
            double v = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
            return v;
        }
        case Kind::sine:
            return amplitude * std::sin(k * M_PI * x);
    }
    return 0.0;
}

Vec FunctionRecipe::sample(const Grid& g) const {
    Vec v(g.n_interior());
    for (int i = 0; i < g.n_interior(); ++i) v[i] = (*this)(g.xi(i + 1));
    return v;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw std::invalid_argument("config: field '" + field + "' " + why);
}

const json* find(const json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double need_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "must be a number");
    return j.get<double>();
}

double opt_number(const json& j, const std::string& key, const std::string& path, double dflt) {
    const json* v = find(j, key);
    return v ? need_number(*v, path + "." + key) : dflt;
}

int opt_int(const json& j, const std::string& key, const std::string& path, int dflt) {
    const json* v = find(j, key);
    if (!v) return dflt;
    if (!v->is_number_integer()) fail(path + "." + key, "must be an integer");
    return v->get<int>();
}

std::vector<double> need_number_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) fail(path, "must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

CoefficientRecipe parse_coeff(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be an object");
    const json* kind = find(j, "kind");
    if (!kind || !kind->is_string()) fail(path + ".kind", "is required (string)");
    const std::string k = kind->get<std::string>();
    CoefficientRecipe r;
    if (k == "constant")
        r.kind = CoefficientRecipe::Kind::constant;
    else if (k == "periodic_sin2")
        r.kind = CoefficientRecipe::Kind::periodic_sin2;
    else if (k == "piecewise_periodic")
        r.kind = CoefficientRecipe::Kind::piecewise_periodic;
    else if (k == "tabulated")
        r.kind = CoefficientRecipe::Kind::tabulated;
    else
        fail(path + ".kind", "must be one of constant|periodic_sin2|piecewise_periodic|tabulated");
    if (const json* p = find(j, "params")) {
        if (!p->is_object()) fail(path + ".params", "must be an object");
        for (auto it = p->begin(); it != p->end(); ++it)
            r.params[it.key()] = need_number(it.value(), path + ".params." + it.key());
    }
    if (const json* b = find(j, "breakpoints")) r.breakpoints = need_number_list(*b, path + ".breakpoints");
    if (const json* v = find(j, "values")) r.values = need_number_list(*v, path + ".values");
    if (const json* e = find(j, "epsilon"); e && !e->is_null())
        r.epsilon = need_number(*e, path + ".epsilon");
    return r;
}

FunctionRecipe parse_function(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be an object");
    const json* kind = find(j, "kind");
    if (!kind || !kind->is_string()) fail(path + ".kind", "is required (string)");
    const std::string k = kind->get<std::string>();
    FunctionRecipe r;
    if (k == "constant") {
        r.kind = FunctionRecipe::Kind::constant;
        const json* v = find(j, "value");
        if (!v) fail(path + ".value", "is required for constant");
        r.value = need_number(*v, path + ".value");
    } else if (k == "poly") {
        r.kind = FunctionRecipe::Kind::poly;
        const json* c = find(j, "coeffs");
        if (!c) fail(path + ".coeffs", "is required for poly");
        r.coeffs = need_number_list(*c, path + ".coeffs");
    } else if (k == "sine") {
        r.kind = FunctionRecipe::Kind::sine;
        r.amplitude = opt_number(j, "amplitude", path, 1.0);
        r.k = opt_int(j, "k", path, 1);
    } else {
        fail(path + ".kind", "must be one of constant|poly|sine");
    }
    return r;
}

}  // namespace

double ExperimentConfig::single_epsilon() const {
    if (epsilon) return *epsilon;
    if (!epsilon_list.empty()) return epsilon_list.front();
    return a_recipe.epsilon.value_or(1.0);
}

SweepSetup ExperimentConfig::sweep_setup() const {
    SweepSetup s;
    s.grid = build_grid(n_cells);
    s.timegrid = TimeGrid(T, n_steps);
    s.window_lo = window_lo;
    s.window_hi = window_hi;
    s.a_recipe = a_recipe;
    s.b_recipe = b_recipe;
    s.p_recipe = p_recipe;
    s.y0 = y0_recipe.sample(s.grid);
    s.y_d = y_d_recipe.sample(s.grid);
    s.epsilons = epsilon_list;
    s.C = turnpike_C;
    s.mu = turnpike_mu;
    s.cg_tol = cg_tol;
    s.cg_max_iter = cg_max_iter;
    s.envelope_floor = envelope_floor;
    s.fit_lo_frac = fit_lo_frac;
    s.fit_hi_frac = fit_hi_frac;
    s.fit_floor = std::max(1e-14, 10.0 * cg_tol);
    s.sampling = sampling;
    return s;
}

OCPConfig ExperimentConfig::ocp_config(double eps) const {
    OCPConfig cfg;
    cfg.grid = build_grid(n_cells);
    cfg.timegrid = TimeGrid(T, n_steps);
    CoefficientRecipe arec = a_recipe;
    if (arec.periodic() && arec.kind != CoefficientRecipe::Kind::constant) arec.epsilon = eps;
    cfg.coeffs = sample_coefficients(arec, b_recipe, p_recipe, cfg.grid, sampling);
    cfg.window = make_window(cfg.grid, window_lo, window_hi);
    cfg.y0 = y0_recipe.sample(cfg.grid);
    cfg.y_d = y_d_recipe.sample(cfg.grid);
    cfg.cg_tol = cg_tol;
    cfg.cg_max_iter = cg_max_iter;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& json_path) {
    ExperimentConfig c;
    c.y0_recipe.kind = FunctionRecipe::Kind::poly;
    c.y0_recipe.coeffs = {0.0, -1.0, 1.0};  // x(x-1)
    c.y_d_recipe.kind = FunctionRecipe::Kind::constant;
    c.y_d_recipe.value = 1.0;
    if (json_path.empty()) return c;

    std::ifstream in(json_path);
    if (!in) throw std::invalid_argument("config: cannot open " + json_path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("<root>", "must be a JSON object");

    if (const json* g = find(j, "grid")) {
        c.n_cells = opt_int(*g, "n_cells", "grid", c.n_cells);
        if (c.n_cells < 4) fail("grid.n_cells", "must be >= 4");
    }
    if (const json* t = find(j, "time")) {
        c.T = opt_number(*t, "T", "time", c.T);
        c.n_steps = opt_int(*t, "n_steps", "time", c.n_steps);
        if (!(c.T > 0.0)) fail("time.T", "must be positive");
        if (c.n_steps < 2) fail("time.n_steps", "must be >= 2");
    }
    if (const json* co = find(j, "coefficients")) {
        if (const json* a = find(*co, "a")) c.a_recipe = parse_coeff(*a, "coefficients.a");
        if (const json* b = find(*co, "b")) c.b_recipe = parse_coeff(*b, "coefficients.b");
        if (const json* p = find(*co, "p")) c.p_recipe = parse_coeff(*p, "coefficients.p");
    }
    if (const json* e = find(j, "epsilon_list")) c.epsilon_list = need_number_list(*e, "epsilon_list");
    for (std::size_t i = 1; i < c.epsilon_list.size(); ++i)
        if (!(c.epsilon_list[i] < c.epsilon_list[i - 1]))
            fail("epsilon_list", "must be positive and sorted descending");
    if (!c.epsilon_list.empty() && !(c.epsilon_list.back() > 0.0))
        fail("epsilon_list", "must be positive");
    if (const json* e = find(j, "epsilon"); e && !e->is_null())
        c.epsilon = need_number(*e, "epsilon");
    if (const json* w = find(j, "window")) {
        c.window_lo = opt_number(*w, "x_lo", "window", c.window_lo);
        c.window_hi = opt_number(*w, "x_hi", "window", c.window_hi);
        if (!(c.window_lo >= 0.0 && c.window_lo < c.window_hi && c.window_hi <= 1.0))
            fail("window", "needs 0 <= x_lo < x_hi <= 1");
    }
    if (const json* f = find(j, "y0")) c.y0_recipe = parse_function(*f, "y0");
    if (const json* f = find(j, "y_d")) c.y_d_recipe = parse_function(*f, "y_d");
    if (const json* t = find(j, "turnpike")) {
        c.turnpike_C = opt_number(*t, "C", "turnpike", c.turnpike_C);
        c.turnpike_mu = opt_number(*t, "mu", "turnpike", c.turnpike_mu);
        c.envelope_floor = opt_number(*t, "envelope_floor", "turnpike", c.envelope_floor);
        c.fit_lo_frac = opt_number(*t, "fit_lo_frac", "turnpike", c.fit_lo_frac);
        c.fit_hi_frac = opt_number(*t, "fit_hi_frac", "turnpike", c.fit_hi_frac);
        if (!(c.turnpike_C > 0.0 && c.turnpike_mu > 0.0)) fail("turnpike", "C and mu must be positive");
    }
    if (const json* s = find(j, "solver")) {
        c.cg_tol = opt_number(*s, "cg_tol", "solver", c.cg_tol);
        c.cg_max_iter = opt_int(*s, "cg_max_iter", "solver", c.cg_max_iter);
        if (!(c.cg_tol > 0.0)) fail("solver.cg_tol", "must be positive");
    }
    if (const json* s = find(j, "sampling")) {
        c.sampling.quad_points_per_period =
            opt_number(*s, "quad_points_per_period", "sampling", c.sampling.quad_points_per_period);
        if (const json* a = find(*s, "allow_underresolved")) {
            if (!a->is_boolean()) fail("sampling.allow_underresolved", "must be a boolean");
            c.sampling.allow_underresolved = a->get<bool>();
        }
    }
    if (const json* r = find(j, "riccati")) {
        c.riccati_n_cells = opt_int(*r, "n_cells", "riccati", c.riccati_n_cells);
        c.riccati_n_steps = opt_int(*r, "n_steps", "riccati", c.riccati_n_steps);
        c.riccati_T = opt_number(*r, "T", "riccati", c.riccati_T);
        if (const json* e = find(*r, "epsilons"))
            c.riccati_epsilons = need_number_list(*e, "riccati.epsilons");
        c.gap_fit_floor = opt_number(*r, "gap_fit_floor", "riccati", c.gap_fit_floor);
        if (c.riccati_n_cells - 1 > 401) fail("riccati.n_cells", "dense guard: n_cells-1 must be <= 401");
    }
    if (const json* h = find(j, "hum")) {
        c.hum_T = opt_number(*h, "T", "hum", c.hum_T);
        c.hum_n_steps = opt_int(*h, "n_steps", "hum", c.hum_n_steps);
        c.hum_delta = opt_number(*h, "delta", "hum", c.hum_delta);
        c.hum_cg_tol = opt_number(*h, "cg_tol", "hum", c.hum_cg_tol);
        if (const json* w = find(*h, "window")) {
            c.hum_window_lo = opt_number(*w, "x_lo", "hum.window", c.hum_window_lo);
            c.hum_window_hi = opt_number(*w, "x_hi", "hum.window", c.hum_window_hi);
        }
        if (const json* e = find(*h, "epsilons")) c.hum_epsilons = need_number_list(*e, "hum.epsilons");
        if (!(c.hum_delta > 0.0)) fail("hum.delta", "must be positive");
    }
    if (const json* o = find(j, "output_dir")) {
        if (!o->is_string()) fail("output_dir", "must be a string");
        c.output_dir = o->get<std::string>();
    }
    if (const json* s = find(j, "seed")) {
        if (!s->is_number_unsigned()) fail("seed", "must be a non-negative integer");
        c.seed = s->get<unsigned long>();
    }
    return c;
}

}  // namespace turnpike
