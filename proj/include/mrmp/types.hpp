#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrmp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct InvalidInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Discrete linear dynamics x[t+1] = A x[t] + B u[t]. A and B are already
// discrete; dt is carried along as metadata only.
struct DynamicsModel {
    Mat A;          // 2n x 2n
    Mat B;          // 2n x m
    int n = 0;      // configuration dimension
    int m = 0;      // control dimension (0 for obstacles)
    double dt = 0.0;

    int state_dim() const { return 2 * n; }
};

struct RobotSpec {
    int id = 0;
    DynamicsModel dynamics;
    double radius = 0.0;
    double u_max = 0.0;
    Vec x_init;  // length 2n
    Vec x_goal;  // length 2n
};

// Obstacle trajectories are given data, never decision variables.
struct ObstacleSpec {
    int id = 0;
    double radius = 0.0;
    std::vector<Vec> states;  // exactly T+1 entries, each length 2n
};

// Position selector: position = G x = x.head(n).
inline Eigen::VectorBlock<const Vec> position_of(const Vec& x, int n) { return x.head(n); }

struct ProblemInstance {
    std::vector<RobotSpec> robots;
    std::vector<ObstacleSpec> obstacles;
    int T = 0;  // number of control steps; states run t = 1..T+1
    int n = 0;  // shared configuration dimension
    int p = 1;  // control-bound norm, in {1, 2}
    int q = 1;  // objective norm, in {1, 2}
    double dt = 0.0;

    int num_entities() const { return static_cast<int>(robots.size() + obstacles.size()); }

    const RobotSpec* find_robot(int id) const {
        for (const auto& r : robots)
            if (r.id == id) return &r;
        return nullptr;
    }

    // Structural checks plus the separation preconditions: obstacle-obstacle
    // clearance at every step and robot start/goal clearance against all
    // other fixed endpoints. Throws InvalidInstance on the first violation.
    void validate() const;
};

// Joint solution keyed by entity id. States cover every entity (obstacles
// copied from the instance); controls cover robots only.
struct Solution {
    std::map<int, std::vector<Vec>> states;    // id -> T+1 states
    std::map<int, std::vector<Vec>> controls;  // robot id -> T controls
    double objective = 0.0;
};

struct Tolerances {
    double dynamics = 1e-6;
    double boundary = 1e-6;
    double control = 1e-6;
    double collision = 1e-4;
};

struct FeasibilityReport {
    double dynamics_residual = 0.0;
    double boundary_residual = 0.0;
    double control_violation = 0.0;
    double collision_violation = 0.0;
    bool feasible = false;
};

// Robot id -> positions (length n) for t = 1..T+1. Seeds carry positions
// only; velocity components never enter the penalty.
using SeedPositions = std::map<int, std::vector<Vec>>;

}  // namespace mrmp
