#pragma once

#include <span>

#include "mrmp/types.hpp"

namespace mrmp {

// p-norm for p in {1, 2}.
double norm_p(const Vec& v, int p);

// Zero-order-hold discrete double integrator in n dimensions:
// A = [[I, dt I], [0, I]], B = [[dt^2/2 I], [dt I]].
DynamicsModel build_double_integrator(int n, double dt);

// A x + B u, with dimension checks.
Vec propagate(const DynamicsModel& model, const Vec& x, const Vec& u);

// Forward simulation from x_init; no constraint checking.
std::vector<Vec> rollout(const RobotSpec& robot, std::span<const Vec> controls);

// Linear interpolation of positions from start to goal, T+1 samples.
SeedPositions straight_line_seed(const ProblemInstance& instance);

// Sum over robots and control steps of ||u||_q.
double evaluate_objective(const ProblemInstance& instance, const Solution& solution);

// Independent feasibility check; this is the oracle every solver is judged
// against. Collision is checked at the discrete steps t = 1..T+1 for all
// robot-robot and robot-obstacle pairs.
FeasibilityReport verify(const ProblemInstance& instance, const Solution& solution,
                         const Tolerances& tol = {});

// Assembles a Solution from per-robot controls by rollout (obstacle states
// copied from the instance) and fills in the objective.
Solution solution_from_controls(const ProblemInstance& instance,
                                const std::map<int, std::vector<Vec>>& controls);

// Collision margin of a set of seed positions against the instance's
// obstacles and between robots: max over pairs/steps of (r_i + r_j - dist)+.
double seed_collision_violation(const ProblemInstance& instance, const SeedPositions& seed);

}  // namespace mrmp
