#include "mrmp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mrmp/kernels/collision.hpp"

namespace mrmp {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw InvalidInstance(msg); }

void require(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
}

}  // namespace

double norm_p(const Vec& v, int p) {
    switch (p) {
        case 1:
            return v.lpNorm<1>();
        case 2:
            return v.norm();
        default:
            fail("unsupported norm p=" + std::to_string(p));
    }
}

DynamicsModel build_double_integrator(int n, double dt) {
    require(n >= 1 && n <= 3, "double integrator supports n in {1,2,3}, got n=" + std::to_string(n));
    require(dt > 0.0, "double integrator requires dt > 0");
    DynamicsModel model;
    model.n = n;
    model.m = n;
    model.dt = dt;
    model.A = Mat::Identity(2 * n, 2 * n);
    model.A.topRightCorner(n, n) = dt * Mat::Identity(n, n);
    model.B = Mat::Zero(2 * n, n);
    model.B.topRows(n) = 0.5 * dt * dt * Mat::Identity(n, n);
    model.B.bottomRows(n) = dt * Mat::Identity(n, n);
    return model;
}

Vec propagate(const DynamicsModel& model, const Vec& x, const Vec& u) {
    require(x.size() == model.A.cols(), "propagate: state dimension mismatch");
    require(u.size() == model.B.cols(), "propagate: control dimension mismatch");
    if (model.m == 0) return model.A * x;
    return model.A * x + model.B * u;
}

std::vector<Vec> rollout(const RobotSpec& robot, std::span<const Vec> controls) {
    std::vector<Vec> states;
    states.reserve(controls.size() + 1);
    states.push_back(robot.x_init);
    for (const Vec& u : controls) states.push_back(propagate(robot.dynamics, states.back(), u));
    return states;
}

SeedPositions straight_line_seed(const ProblemInstance& instance) {
    SeedPositions seed;
    for (const auto& robot : instance.robots) {
        const Vec p0 = robot.x_init.head(instance.n);
        const Vec p1 = robot.x_goal.head(instance.n);
        std::vector<Vec> positions;
        positions.reserve(instance.T + 1);
        for (int k = 0; k <= instance.T; ++k) {
            const double alpha = static_cast<double>(k) / instance.T;
            positions.push_back(p0 + alpha * (p1 - p0));
        }
        seed[robot.id] = std::move(positions);
    }
    return seed;
}

double evaluate_objective(const ProblemInstance& instance, const Solution& solution) {
    double total = 0.0;
    for (const auto& robot : instance.robots) {
        auto it = solution.controls.find(robot.id);
        require(it != solution.controls.end(),
                "objective: missing controls for robot " + std::to_string(robot.id));
        require(static_cast<int>(it->second.size()) == instance.T,
                "objective: control sequence length mismatch for robot " + std::to_string(robot.id));
        for (const Vec& u : it->second) total += norm_p(u, instance.q);
    }
    return total;
}

namespace {

// Entities flattened robots-first for the collision kernel.
struct FlatPositions {
    std::vector<double> positions;
    std::vector<double> radii;
    int num_entities = 0;
    int num_robots = 0;
};

FlatPositions flatten_positions(const ProblemInstance& instance, const Solution& solution) {
    FlatPositions flat;
    const int steps = instance.T + 1;
    const int dim = instance.n;
    flat.num_robots = static_cast<int>(instance.robots.size());
    flat.num_entities = instance.num_entities();
    flat.positions.resize(static_cast<size_t>(flat.num_entities) * steps * dim);
    flat.radii.resize(flat.num_entities);

    int e = 0;
    auto copy_states = [&](int id, double radius, const std::vector<Vec>& states) {
        flat.radii[e] = radius;
        for (int t = 0; t < steps; ++t) {
            for (int k = 0; k < dim; ++k)
                flat.positions[(static_cast<size_t>(e) * steps + t) * dim + k] = states[t](k);
        }
        ++e;
    };
    for (const auto& robot : instance.robots) {
        const auto it = solution.states.find(robot.id);
        require(it != solution.states.end() && static_cast<int>(it->second.size()) == steps,
                "verify: missing states for robot " + std::to_string(robot.id));
        copy_states(robot.id, robot.radius, it->second);
    }
    for (const auto& obstacle : instance.obstacles) {
        const auto it = solution.states.find(obstacle.id);
        const std::vector<Vec>& states =
            (it != solution.states.end()) ? it->second : obstacle.states;
        require(static_cast<int>(states.size()) == steps, "verify: obstacle state length mismatch");
        copy_states(obstacle.id, obstacle.radius, states);
    }
    return flat;
}

}  // namespace

FeasibilityReport verify(const ProblemInstance& instance, const Solution& solution,
                         const Tolerances& tol) {
    FeasibilityReport report;
    const int T = instance.T;

    for (const auto& robot : instance.robots) {
        const auto st = solution.states.find(robot.id);
        const auto ct = solution.controls.find(robot.id);
        require(st != solution.states.end() && static_cast<int>(st->second.size()) == T + 1,
                "verify: incomplete states for robot " + std::to_string(robot.id));
        require(ct != solution.controls.end() && static_cast<int>(ct->second.size()) == T,
                "verify: incomplete controls for robot " + std::to_string(robot.id));
        const auto& xs = st->second;
        const auto& us = ct->second;

        for (int k = 0; k < T; ++k) {
            const Vec predicted = propagate(robot.dynamics, xs[k], us[k]);
            report.dynamics_residual =
                std::max(report.dynamics_residual, (xs[k + 1] - predicted).lpNorm<Eigen::Infinity>());
            const double excess = norm_p(us[k], instance.p) - robot.u_max;
            report.control_violation = std::max(report.control_violation, std::max(0.0, excess));
        }
        report.boundary_residual =
            std::max(report.boundary_residual, (xs.front() - robot.x_init).lpNorm<Eigen::Infinity>());
        report.boundary_residual =
            std::max(report.boundary_residual, (xs.back() - robot.x_goal).lpNorm<Eigen::Infinity>());
    }

    const FlatPositions flat = flatten_positions(instance, solution);
    report.collision_violation = kernels::max_collision_violation_omp(
        flat.positions.data(), flat.num_entities, T + 1, instance.n, flat.radii.data(),
        flat.num_robots);

    report.feasible = report.dynamics_residual <= tol.dynamics &&
                      report.boundary_residual <= tol.boundary &&
                      report.control_violation <= tol.control &&
                      report.collision_violation <= tol.collision;
    return report;
}

Solution solution_from_controls(const ProblemInstance& instance,
                                const std::map<int, std::vector<Vec>>& controls) {
    Solution solution;
    for (const auto& robot : instance.robots) {
        auto it = controls.find(robot.id);
        require(it != controls.end(), "missing controls for robot " + std::to_string(robot.id));
        solution.states[robot.id] = rollout(robot, it->second);
        solution.controls[robot.id] = it->second;
    }
    for (const auto& obstacle : instance.obstacles) solution.states[obstacle.id] = obstacle.states;
    solution.objective = evaluate_objective(instance, solution);
    return solution;
}

double seed_collision_violation(const ProblemInstance& instance, const SeedPositions& seed) {
    const int steps = instance.T + 1;
    const int dim = instance.n;
    const int num_robots = static_cast<int>(instance.robots.size());
    const int num_entities = instance.num_entities();
    std::vector<double> positions(static_cast<size_t>(num_entities) * steps * dim);
    std::vector<double> radii(num_entities);

    int e = 0;
    for (const auto& robot : instance.robots) {
        const auto it = seed.find(robot.id);
        require(it != seed.end() && static_cast<int>(it->second.size()) == steps,
                "seed missing positions for robot " + std::to_string(robot.id));
        radii[e] = robot.radius;
        for (int t = 0; t < steps; ++t)
            for (int k = 0; k < dim; ++k)
                positions[(static_cast<size_t>(e) * steps + t) * dim + k] = it->second[t](k);
        ++e;
    }
    for (const auto& obstacle : instance.obstacles) {
        radii[e] = obstacle.radius;
        for (int t = 0; t < steps; ++t)
            for (int k = 0; k < dim; ++k)
                positions[(static_cast<size_t>(e) * steps + t) * dim + k] = obstacle.states[t](k);
        ++e;
    }
    return kernels::max_collision_violation_omp(positions.data(), num_entities, steps, dim,
                                                radii.data(), num_robots);
}

void ProblemInstance::validate() const {
    require(T >= 1, "instance: horizon T must be >= 1");
    require(n >= 1 && n <= 3, "instance: configuration dimension n must be in {1,2,3}");
    require(p == 1 || p == 2, "instance: control norm p must be 1 or 2");
    require(q == 1 || q == 2, "instance: objective norm q must be 1 or 2");
    require(!robots.empty(), "instance: at least one robot required");

    std::map<int, bool> seen;
    auto check_id = [&](int id) {
        require(id >= 1, "instance: entity ids must be >= 1");
        require(!seen.count(id), "instance: duplicate entity id " + std::to_string(id));
        seen[id] = true;
    };

    for (const auto& robot : robots) {
        check_id(robot.id);
        require(robot.radius > 0.0, "instance: robot radius must be positive");
        require(robot.u_max > 0.0, "instance: robot u_max must be positive");
        require(robot.dynamics.n == n, "instance: robot dynamics dimension mismatch");
        require(robot.dynamics.A.rows() == 2 * n && robot.dynamics.A.cols() == 2 * n,
                "instance: A must be 2n x 2n");
        require(robot.dynamics.B.rows() == 2 * n &&
                    robot.dynamics.B.cols() == robot.dynamics.m,
                "instance: B must be 2n x m");
        require(robot.x_init.size() == 2 * n && robot.x_goal.size() == 2 * n,
                "instance: boundary states must have length 2n");
        require(robot.x_init.allFinite() && robot.x_goal.allFinite(),
                "instance: boundary states must be finite");
    }
    for (const auto& obstacle : obstacles) {
        check_id(obstacle.id);
        require(obstacle.radius > 0.0, "instance: obstacle radius must be positive");
        require(static_cast<int>(obstacle.states.size()) == T + 1,
                "instance: obstacle must provide exactly T+1 states");
        for (const Vec& x : obstacle.states)
            require(x.size() == 2 * n && x.allFinite(), "instance: bad obstacle state");
    }

    // Obstacle-obstacle separation at every step: these are constants, so an
    // overlap is a modelling error rather than a constraint to optimize.
    for (size_t a = 0; a < obstacles.size(); ++a) {
        for (size_t b = a + 1; b < obstacles.size(); ++b) {
            const double rsum = obstacles[a].radius + obstacles[b].radius;
            for (int t = 0; t <= T; ++t) {
                const double dist =
                    (obstacles[a].states[t].head(n) - obstacles[b].states[t].head(n)).norm();
                if (dist < rsum) {
                    std::ostringstream os;
                    os << "instance: obstacles " << obstacles[a].id << " and " << obstacles[b].id
                       << " overlap at t=" << (t + 1) << " (dist " << dist << " < " << rsum << ")";
                    fail(os.str());
                }
            }
        }
    }

    // Endpoint separation: starts and goals are pinned by the boundary
    // conditions, so overlap there makes the instance infeasible outright.
    auto endpoint_check = [&](bool at_goal) {
        const int t = at_goal ? T : 0;
        for (size_t a = 0; a < robots.size(); ++a) {
            const Vec pa = (at_goal ? robots[a].x_goal : robots[a].x_init).head(n);
            for (size_t b = a + 1; b < robots.size(); ++b) {
                const Vec pb = (at_goal ? robots[b].x_goal : robots[b].x_init).head(n);
                if ((pa - pb).norm() < robots[a].radius + robots[b].radius)
                    fail("instance: robots " + std::to_string(robots[a].id) + " and " +
                         std::to_string(robots[b].id) + (at_goal ? " overlap at goal" : " overlap at start"));
            }
            for (const auto& obstacle : obstacles) {
                if ((pa - obstacle.states[t].head(n)).norm() < robots[a].radius + obstacle.radius)
                    fail("instance: robot " + std::to_string(robots[a].id) + " overlaps obstacle " +
                         std::to_string(obstacle.id) + (at_goal ? " at goal" : " at start"));
            }
        }
    };
    endpoint_check(false);
    endpoint_check(true);
}

}  // namespace mrmp
