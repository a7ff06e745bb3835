#include <doctest.h>

#include "mrmp/conic/ipm.hpp"
#include "mrmp/scp.hpp"
#include "mrmp/sequential.hpp"
#include "oracles.hpp"

using namespace mrmp;

namespace {

conic::IpmBackend seq_backend;

ProblemInstance rest_to_rest_instance(int T = 30) {
    ProblemInstance instance;
    instance.n = 2;
    instance.T = T;
    instance.dt = 0.1;
    instance.p = 1;
    instance.q = 1;
    instance.robots.push_back(
        oracles::make_robot(1, 2, 0.1, oracles::rest_state(0.05, 0.05), oracles::rest_state(0.95, 0.95)));
    return instance;
}

}  // namespace

TEST_CASE("stopping criterion boundary cases") {
    CHECK(stopping_criterion(100.0, 100.005, 1e-4));        // 5e-5 <= 1e-4
    CHECK_FALSE(stopping_criterion(100.0, 100.02, 1e-4));   // 2e-4 > 1e-4
    CHECK(stopping_criterion(0.0, 0.0, 1e-4));              // epsilon guard
    CHECK(stopping_criterion(1.0, 1.0 + 1e-4, 1e-4));       // exactly at the threshold
    CHECK_FALSE(stopping_criterion(1.0, 1.0 + 1.001e-4, 1e-4));
    CHECK(stopping_criterion(-50.0, -50.004, 1e-4));        // sign-insensitive
}

TEST_CASE("single robot converges to the unconstrained convex optimum") {
    const auto instance = rest_to_rest_instance();

    // Oracle: the convex problem without any collision handling.
    auto base = relax::build_base_program(instance);
    const auto direct = conic::solve(base.program, seq_backend);
    REQUIRE(direct.status == conic::SolveStatus::optimal);

    SequentialConfig config;
    const auto report = solve_sequential(instance, std::nullopt, config, seq_backend);
    REQUIRE(report.termination == Termination::converged);
    CHECK(report.iterations.size() <= 3);
    CHECK(report.feasible);
    CHECK(report.final_solution.objective <=
          direct.objective_value * 1.001 + 1e-9);
    CHECK(report.final_solution.objective >= direct.objective_value - 1e-6);
}

TEST_CASE("seeding at a converged point terminates at the second iteration") {
    const auto instance = rest_to_rest_instance(20);
    SequentialConfig config;
    const auto first = solve_sequential(instance, std::nullopt, config, seq_backend);
    REQUIRE(first.termination == Termination::converged);

    SeedPositions seed;
    for (const auto& [id, xs] : first.final_solution.states) {
        std::vector<Vec> ps(xs.size());
        for (size_t k = 0; k < xs.size(); ++k) ps[k] = xs[k].head(2);
        seed[id] = std::move(ps);
    }
    const auto again = solve_sequential(instance, seed, config, seq_backend);
    REQUIRE(again.termination == Termination::converged);
    CHECK(again.iterations.size() == 2);
    CHECK(std::abs(again.iterations[1].true_objective - again.iterations[0].true_objective) <
          config.rel_obj_tol * std::max(1.0, std::abs(again.iterations[0].true_objective)));
}

TEST_CASE("two-robot crossing conflict resolves collisions") {
    // Crossing paths whose seeds conflict but do not overlap fully: full
    // head-on overlap at matched times is a degenerate saddle of the
    // penalized landscape (the separation gradient vanishes there).
    ProblemInstance instance;
    instance.n = 2;
    instance.T = 30;
    instance.dt = 0.5;
    instance.p = 1;
    instance.q = 1;
    instance.robots.push_back(
        oracles::make_robot(1, 2, 0.5, oracles::rest_state(0.1, 0.5), oracles::rest_state(0.9, 0.5)));
    instance.robots.push_back(
        oracles::make_robot(2, 2, 0.5, oracles::rest_state(0.6, 0.1), oracles::rest_state(0.6, 0.9)));

    // The straight-line seed collides head-on.
    CHECK(seed_collision_violation(instance, straight_line_seed(instance)) > 0.0);

    SequentialConfig config;
    const auto report = solve_sequential(instance, std::nullopt, config, seq_backend);
    REQUIRE(report.termination == Termination::converged);
    CHECK(report.feasible);
    CHECK(report.iterations.back().collision_violation <= 1e-4);
    CHECK(report.final_max_gap <= 1e-4);

    // Exactness at convergence implies the verifier passes.
    const auto feas = verify(instance, report.final_solution);
    CHECK(feas.feasible);
}

TEST_CASE("feasibility preservation from a hand-built detour seed") {
    const auto detour = oracles::detour_swap_case(1);
    detour.instance.validate();
    const auto seed_check = verify(detour.instance, detour.seed_solution);
    REQUIRE(seed_check.feasible);

    SequentialConfig config;
    const auto trace =
        feasibility_preservation_check(detour.instance, detour.seed_solution, config, seq_backend);
    CHECK(trace.all_iterates_feasible);
    CHECK(trace.objective_monotone);
    CHECK(trace.objectives.size() >= 2);
    // The first solve may not improve on an already-tight seed but must not
    // regress.
    CHECK(trace.objectives.back() <= trace.objectives.front() + 1e-6);
}

TEST_CASE("infeasible seeds are rejected by the preservation check") {
    ProblemInstance instance;
    instance.n = 2;
    instance.T = 10;
    instance.dt = 0.1;
    instance.robots.push_back(
        oracles::make_robot(1, 2, 0.1, oracles::rest_state(0.1, 0.5), oracles::rest_state(0.9, 0.5)));
    instance.robots.push_back(
        oracles::make_robot(2, 2, 0.1, oracles::rest_state(0.9, 0.52), oracles::rest_state(0.1, 0.48)));

    // Straight-line controls collide mid-way; build the colliding solution.
    std::map<int, std::vector<Vec>> controls;
    controls[1] = std::vector<Vec>(10, Vec::Zero(2));
    controls[2] = std::vector<Vec>(10, Vec::Zero(2));
    Solution colliding;
    colliding.states[1] = std::vector<Vec>(11, oracles::rest_state(0.5, 0.5));
    colliding.states[2] = std::vector<Vec>(11, oracles::rest_state(0.52, 0.5));
    colliding.controls = controls;
    CHECK_THROWS_AS(
        feasibility_preservation_check(instance, colliding, SequentialConfig{}, seq_backend),
        std::invalid_argument);
}

TEST_CASE("subproblem failure surfaces as a termination reason") {
    // An instance whose boundary conditions are dynamically unreachable:
    // u_max too small to cross in time.
    ProblemInstance instance;
    instance.n = 2;
    instance.T = 2;
    instance.dt = 0.01;
    instance.p = 1;
    instance.q = 1;
    instance.robots.push_back(oracles::make_robot(1, 2, 0.01, oracles::rest_state(0.0, 0.0),
                                                  oracles::rest_state(0.9, 0.9), 0.05, 0.1));
    SequentialConfig config;
    const auto report = solve_sequential(instance, std::nullopt, config, seq_backend);
    CHECK(report.termination == Termination::subproblem_failure);
    CHECK(report.iterations.empty());
    CHECK_FALSE(report.feasible);
}
