#include "mrmp/bench/generators.hpp"

#include <cmath>

#include "mrmp/model.hpp"
#include "mrmp/rng.hpp"

namespace mrmp::bench {

namespace {

Vec rest_state(const Vec& position) {
    Vec x = Vec::Zero(2 * position.size());
    x.head(position.size()) = position;
    return x;
}

bool separated(const Vec& a, const Vec& b, double min_dist) {
    return (a - b).norm() >= min_dist;
}

}  // namespace

ProblemInstance generate_random_instance(const RandomMapSpec& spec, const DynamicsModel& dynamics,
                                         int T, double u_max, int p, int q) {
    if (dynamics.n != spec.dimension)
        throw GenerationError("generator: dynamics dimension does not match the map spec");
    const double radius = 0.5 * spec.entity_diameter;
    const double lo = spec.arena_min + radius;
    const double hi = spec.arena_max - radius;
    if (lo >= hi) throw GenerationError("generator: entities do not fit the arena");

    SplitMix64 rng(spec.rng_seed);
    int attempts_left = spec.max_placement_attempts;
    auto sample = [&]() {
        Vec point(spec.dimension);
        for (int k = 0; k < spec.dimension; ++k) point(k) = rng.uniform(lo, hi);
        return point;
    };
    auto place = [&](const std::vector<Vec>& against) {
        while (attempts_left > 0) {
            --attempts_left;
            Vec candidate = sample();
            bool ok = true;
            for (const auto& other : against)
                if (!separated(candidate, other, spec.entity_diameter)) {
                    ok = false;
                    break;
                }
            if (ok) return candidate;
        }
        throw GenerationError("generator: placement attempts exhausted (packing too dense)");
    };

    // Starts and obstacles are one mutually separated configuration.
    std::vector<Vec> starts;
    for (int r = 0; r < spec.num_robots; ++r) starts.push_back(place(starts));
    std::vector<Vec> obstacles = starts;  // accumulate constraints
    std::vector<Vec> obstacle_positions;
    for (int o = 0; o < spec.num_obstacles; ++o) {
        obstacles.push_back(place(obstacles));
        obstacle_positions.push_back(obstacles.back());
    }
    // Goals are separated from other goals and from the obstacles.
    std::vector<Vec> goals_and_obstacles = obstacle_positions;
    std::vector<Vec> goals;
    for (int r = 0; r < spec.num_robots; ++r) {
        goals_and_obstacles.push_back(place(goals_and_obstacles));
        goals.push_back(goals_and_obstacles.back());
    }

    ProblemInstance instance;
    instance.n = spec.dimension;
    instance.T = T;
    instance.dt = dynamics.dt;
    instance.p = p;
    instance.q = q;
    for (int r = 0; r < spec.num_robots; ++r) {
        RobotSpec robot;
        robot.id = r + 1;
        robot.dynamics = dynamics;
        robot.radius = radius;
        robot.u_max = u_max;
        robot.x_init = rest_state(starts[r]);
        robot.x_goal = rest_state(goals[r]);
        instance.robots.push_back(std::move(robot));
    }
    for (int o = 0; o < spec.num_obstacles; ++o) {
        ObstacleSpec obstacle;
        obstacle.id = spec.num_robots + o + 1;
        obstacle.radius = radius;
        obstacle.states.assign(T + 1, rest_state(obstacle_positions[o]));
        instance.obstacles.push_back(std::move(obstacle));
    }
    instance.validate();
    return instance;
}

ProblemInstance generate_random_instance(const RandomMapSpec& spec, const InstanceParams& params) {
    const auto dynamics = build_double_integrator(spec.dimension, params.dt);
    return generate_random_instance(spec, dynamics, params.T, params.u_max, params.p, params.q);
}

namespace {

ProblemInstance preset_base(const PresetParams& params, int dimension = 2) {
    ProblemInstance instance;
    instance.n = dimension;
    instance.T = params.base.T;
    instance.dt = params.base.dt;
    instance.p = params.base.p;
    instance.q = params.base.q;
    return instance;
}

RobotSpec preset_robot(const PresetParams& params, int id, const Vec& start, const Vec& goal) {
    RobotSpec robot;
    robot.id = id;
    robot.dynamics = build_double_integrator(2, params.base.dt);
    robot.radius = 0.5 * params.entity_diameter;
    robot.u_max = params.base.u_max;
    robot.x_init = rest_state(start);
    robot.x_goal = rest_state(goal);
    return robot;
}

void add_wall(ProblemInstance& instance, int& next_id, const PresetParams& params, double x,
              double y_from, double y_to) {
    const double radius = 0.5 * params.entity_diameter;
    const double spacing = params.entity_diameter * 1.1;
    if (y_to < y_from) return;
    const int count = std::max(1, static_cast<int>(std::floor((y_to - y_from) / spacing)) + 1);
    for (int k = 0; k < count; ++k) {
        ObstacleSpec obstacle;
        obstacle.id = next_id++;
        obstacle.radius = radius;
        Vec p(2);
        p << x, y_from + k * spacing;
        obstacle.states.assign(instance.T + 1, rest_state(p));
        instance.obstacles.push_back(std::move(obstacle));
    }
}

ProblemInstance make_bottleneck(const PresetParams& params) {
    ProblemInstance instance = preset_base(params);
    const double diameter = params.entity_diameter;
    if (params.gap_width < diameter)
        throw GenerationError("bottleneck: gap narrower than the robot diameter");

    int next_id = params.num_robots + 1;
    const double half_gap = 0.5 * params.gap_width;
    add_wall(instance, next_id, params, 0.5, -0.3, 0.5 - half_gap - 0.5 * diameter);
    add_wall(instance, next_id, params, 0.5, 0.5 + half_gap + 0.5 * diameter, 1.3);

    // Robots spread along the left edge, goals mirrored on the right.
    for (int r = 0; r < params.num_robots; ++r) {
        const double y = 0.15 + 0.7 * (params.num_robots == 1 ? 0.5
                                                              : static_cast<double>(r) /
                                                                    (params.num_robots - 1));
        Vec start(2), goal(2);
        start << 0.08, y;
        goal << 0.92, 1.0 - y;
        instance.robots.insert(instance.robots.begin() + r,
                               preset_robot(params, r + 1, start, goal));
    }
    instance.validate();
    return instance;
}

ProblemInstance make_maze(const PresetParams& params) {
    ProblemInstance instance = preset_base(params);
    const double diameter = params.entity_diameter;
    if (params.clearance < diameter)
        throw GenerationError("maze: clearance narrower than the robot diameter");

    // Three staggered walls leaving `clearance`-wide openings alternately at
    // the top and bottom.
    int next_id = params.num_robots + 1;
    const double opening = params.clearance + diameter;
    add_wall(instance, next_id, params, 0.3, -0.2, 1.0 - opening);
    add_wall(instance, next_id, params, 0.55, opening, 1.2);
    add_wall(instance, next_id, params, 0.8, -0.2, 1.0 - opening);

    for (int r = 0; r < params.num_robots; ++r) {
        const double y = 0.2 + 0.6 * (params.num_robots == 1 ? 0.5
                                                             : static_cast<double>(r) /
                                                                   (params.num_robots - 1));
        Vec start(2), goal(2);
        start << 0.06, y;
        goal << 0.95, y;
        instance.robots.insert(instance.robots.begin() + r,
                               preset_robot(params, r + 1, start, goal));
    }
    instance.validate();
    return instance;
}

ProblemInstance make_swap_circle(const PresetParams& params) {
    ProblemInstance instance = preset_base(params);
    const int k = params.num_robots;
    if (k < 2) throw GenerationError("swap_circle: needs at least two robots");
    const double spacing = 2.0 * params.circle_radius * std::sin(M_PI / k);
    if (spacing < params.entity_diameter)
        throw GenerationError("swap_circle: robots overlap on the circle");
    for (int r = 0; r < k; ++r) {
        const double angle = 2.0 * M_PI * r / k;
        Vec start(2), goal(2);
        start << 0.5 + params.circle_radius * std::cos(angle),
            0.5 + params.circle_radius * std::sin(angle);
        goal << 0.5 - params.circle_radius * std::cos(angle),
            0.5 - params.circle_radius * std::sin(angle);
        instance.robots.push_back(preset_robot(params, r + 1, start, goal));
    }
    instance.validate();
    return instance;
}

}  // namespace

ProblemInstance generate_preset(const std::string& name, const PresetParams& params) {
    if (name == "bottleneck") return make_bottleneck(params);
    if (name == "maze") return make_maze(params);
    if (name == "swap_circle") return make_swap_circle(params);
    throw GenerationError("unknown preset: " + name);
}

SeedPositions point_routed_seed(const ProblemInstance& instance, const Vec& shared_point) {
    if (shared_point.size() != instance.n)
        throw GenerationError("seed: shared point has wrong dimension");
    SeedPositions seed;
    const int T = instance.T;
    const int mid = T / 2;
    for (const auto& robot : instance.robots) {
        const Vec p0 = robot.x_init.head(instance.n);
        const Vec p1 = robot.x_goal.head(instance.n);
        std::vector<Vec> positions(T + 1);
        for (int k = 0; k <= T; ++k) {
            if (k <= mid) {
                const double a = mid == 0 ? 1.0 : static_cast<double>(k) / mid;
                positions[k] = p0 + a * (shared_point - p0);
            } else {
                const double a = static_cast<double>(k - mid) / (T - mid);
                positions[k] = shared_point + a * (p1 - shared_point);
            }
        }
        seed[robot.id] = std::move(positions);
    }
    return seed;
}

}  // namespace mrmp::bench
