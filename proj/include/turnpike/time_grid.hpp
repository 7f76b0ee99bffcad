#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

#include "turnpike/grid.hpp"

namespace turnpike {

struct TimeGrid {
    double T = 0.0;
    int n_steps = 0;
    double dt = 0.0;

    TimeGrid() = default;
    TimeGrid(double horizon, int steps) : T(horizon), n_steps(steps) {
        if (!(horizon > 0.0) || steps < 2)
            throw std::invalid_argument("TimeGrid: need T > 0 and n_steps >= 2");
        dt = T / n_steps;
    }
    double t(int k) const { return k * dt; }
};

/// Time-indexed grid function: one interior-node snapshot per t_k, stored as
/// the k-th column (n x (n_steps+1)).
struct Trajectory {
    TimeGrid tg;
    Eigen::MatrixXd snaps;

    Trajectory() = default;
    Trajectory(const TimeGrid& grid, int n) : tg(grid), snaps(Eigen::MatrixXd::Zero(n, grid.n_steps + 1)) {}

    int n_space() const { return static_cast<int>(snaps.rows()); }
    Eigen::VectorXd at(int k) const { return snaps.col(k); }
    auto col(int k) { return snaps.col(k); }
    auto col(int k) const { return snaps.col(k); }

    void require_matches(const TimeGrid& other, const std::string& who) const {
        if (other.n_steps != tg.n_steps || other.T != tg.T)
            throw std::invalid_argument(who + ": trajectory time grid mismatch");
    }
};

}  // namespace turnpike
