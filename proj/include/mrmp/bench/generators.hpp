#pragma once

#include <string>

#include "mrmp/types.hpp"

namespace mrmp::bench {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shared trajectory parameters for generated instances. The paper fixes the
// arena and entity sizes but not the time scale or horizon; these defaults
// were calibrated so that the fixed penalty weight (eta = 50) dominates the
// fuel cost of collision dodges (the ratio grows with the squared horizon
// length T*dt) while the discretization stays coarse enough for trajectories
// to straddle sub-diameter corridors between obstacle samples.
struct InstanceParams {
    int T = 12;
    double dt = 4.0;
    double u_max = 2.0;
    int p = 1;
    int q = 1;
};

struct RandomMapSpec {
    double arena_min = 0.0;
    double arena_max = 1.0;  // unit square / cube
    int num_robots = 5;
    int num_obstacles = 10;
    double entity_diameter = 0.1;
    uint64_t rng_seed = 0;
    int max_placement_attempts = 10000;
    int dimension = 2;
};

// Rejection-samples robot starts, static obstacles, and robot goals, all
// pairwise separated by the sum of radii (goals against goals and
// obstacles). Robots start and end at rest. Deterministic per rng_seed.
ProblemInstance generate_random_instance(const RandomMapSpec& spec, const DynamicsModel& dynamics,
                                         int T, double u_max, int p, int q);

// Convenience overload wiring the double integrator from InstanceParams.
ProblemInstance generate_random_instance(const RandomMapSpec& spec, const InstanceParams& params);

struct PresetParams {
    int num_robots = 4;
    double entity_diameter = 0.1;
    double gap_width = 0.25;       // bottleneck opening
    double clearance = 0.22;       // maze corridor width
    double circle_radius = 0.4;    // swap_circle
    InstanceParams base;
};

// bottleneck: two obstacle walls with a parameterized gap, robots on one
// side, goals on the other. maze: staggered walls forming a weaving
// corridor. swap_circle: robots on a circle with antipodal goals.
ProblemInstance generate_preset(const std::string& name, const PresetParams& params);

// Piecewise-linear seed routing every robot through one shared interior
// point at mid-horizon.
SeedPositions point_routed_seed(const ProblemInstance& instance, const Vec& shared_point);

}  // namespace mrmp::bench
