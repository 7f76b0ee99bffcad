#pragma once

#include <vector>

namespace turnpike {

/// Uniform mesh of (0,1) with homogeneous Dirichlet endpoints. Unknowns live
/// at the interior nodes x_1..x_{n_cells-1}.
struct Grid {
    int n_cells = 0;
    double dx = 0.0;
    std::vector<double> nodes;  // x_i = i*dx, i = 0..n_cells

    int n_interior() const { return n_cells - 1; }
    double xi(int i) const { return nodes[static_cast<std::size_t>(i)]; }
};

/// Builds the grid; rejects n_cells < 4.
Grid build_grid(int n_cells);

}  // namespace turnpike
