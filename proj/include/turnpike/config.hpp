#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "turnpike/analysis.hpp"

namespace turnpike {

/// Initial / target profiles on (0,1): constant, polynomial in x, or
/// amplitude * sin(k pi x).
struct FunctionRecipe {
    enum class Kind { constant, poly, sine };
    Kind kind = Kind::constant;
    double value = 0.0;                // constant
    std::vector<double> coeffs;        // poly: c0 + c1 x + ...
    double amplitude = 1.0;            // sine
    int k = 1;

    double operator()(double x) const;
    Vec sample(const Grid& g) const;
};

struct ExperimentConfig {
    int n_cells = 421;
    double T = 50.0;
    int n_steps = 168;
    CoefficientRecipe a_recipe = CoefficientRecipe::sin2(0.5);
    CoefficientRecipe b_recipe = CoefficientRecipe::constant(0.0);
    CoefficientRecipe p_recipe = CoefficientRecipe::constant(0.0);
    std::vector<double> epsilon_list{1.0, 0.5, 0.1, 0.05, 0.01, 0.005};
    std::optional<double> epsilon;     // single-run subcommands; default epsilon_list.front()
    double window_lo = 0.0, window_hi = 1.0;
    FunctionRecipe y0_recipe;          // defaults to x(x-1)
    FunctionRecipe y_d_recipe;         // defaults to 1
    double turnpike_C = 10.0, turnpike_mu = 4.0;
    double envelope_floor = 1e-5;
    double fit_lo_frac = 0.05, fit_hi_frac = 0.4;
    double cg_tol = 1e-8;
    int cg_max_iter = 500;
    SampleOptions sampling;

    // Riccati study (its own, coarser grids; dense matrices)
    int riccati_n_cells = 201;
    int riccati_n_steps = 80;
    double riccati_T = 50.0;
    std::vector<double> riccati_epsilons{1.0, 0.1, 0.01};
    double gap_fit_floor = 1e-12;

    // HUM study
    double hum_T = 1.0;
    int hum_n_steps = 100;
    double hum_window_lo = 0.3, hum_window_hi = 0.7;
    double hum_delta = 1e-6;
    std::vector<double> hum_epsilons{1.0, 0.1, 0.01};
    double hum_cg_tol = 1e-10;

    std::filesystem::path output_dir = "out";
    unsigned long seed = 1;

    double single_epsilon() const;
    SweepSetup sweep_setup() const;    // grid/recipes/tolerances wired together
    OCPConfig ocp_config(double eps) const;
};

/// Parses and validates a JSON experiment config; error messages name the
/// offending field. `defaults_only` (empty path) yields the paper setup.
ExperimentConfig load_config(const std::filesystem::path& json_path);

}  // namespace turnpike
