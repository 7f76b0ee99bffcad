#include "turnpike/grid.hpp"

#include <stdexcept>
#include <string>

namespace turnpike {

Grid build_grid(int n_cells) {
    if (n_cells < 4)
        throw std::invalid_argument("build_grid: n_cells must be >= 4, got " +
                                    std::to_string(n_cells));
    Grid g;
    g.n_cells = n_cells;
    g.dx = 1.0 / n_cells;
    g.nodes.resize(static_cast<std::size_t>(n_cells) + 1);
    for (int i = 0; i <= n_cells; ++i) g.nodes[static_cast<std::size_t>(i)] = i * g.dx;
    g.nodes.back() = 1.0;
    return g;
}

}  // namespace turnpike
