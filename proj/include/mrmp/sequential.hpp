#pragma once

#include <optional>

#include "mrmp/relax/builders.hpp"
#include "mrmp/types.hpp"

namespace mrmp {

struct SequentialConfig {
    double eta = 50.0;
    double rel_obj_tol = 1e-4;  // 0.01 percent
    int max_iters = 200;
    relax::Variant variant = relax::Variant::parabolic_simplified;
    bool fix_obstacle_y = true;
    Tolerances feasibility_tolerances;
};

enum class Termination { converged, max_iters, subproblem_failure };
const char* termination_name(Termination t);

struct IterationRecord {
    int iter = 0;  // 1-based
    double true_objective = 0.0;
    double penalized_objective = 0.0;
    double max_gap = 0.0;
    double collision_violation = 0.0;
    double subproblem_time = 0.0;
    bool verify_feasible = false;
};

struct SolveReport {
    std::vector<IterationRecord> iterations;
    Termination termination = Termination::subproblem_failure;
    Solution final_solution;
    bool feasible = false;
    double final_max_gap = std::numeric_limits<double>::quiet_NaN();
    double total_time = 0.0;
    std::string method;
};

// Relative-delta rule on successive penalized objectives:
// |cur - prev| / max(|prev|, 1e-12) <= rel_obj_tol.
bool stopping_criterion(double prev_obj, double cur_obj, double rel_obj_tol);

// Seed, solve the penalized relaxation, re-seed from the iterate, repeat.
// Absent seed means the straight-line interpolation. The feasible flag
// requires both a verify pass and max_gap at the collision tolerance.
SolveReport solve_sequential(const ProblemInstance& instance,
                             const std::optional<SeedPositions>& seed,
                             const SequentialConfig& config, conic::Backend& backend);

struct PreservationTrace {
    bool all_iterates_feasible = false;
    bool objective_monotone = false;  // within 1e-6 slack per step
    std::vector<double> objectives;   // seed objective first, then per iterate
    std::vector<bool> feasible_flags;
    SolveReport report;

    bool ok() const { return all_iterates_feasible && objective_monotone; }
};

// Runs the driver from a feasible solution's positions and checks that every
// iterate stays feasible with non-increasing true objective. The seed must
// pass verify; an infeasible seed is rejected.
PreservationTrace feasibility_preservation_check(const ProblemInstance& instance,
                                                 const Solution& feasible_seed_solution,
                                                 const SequentialConfig& config,
                                                 conic::Backend& backend);

}  // namespace mrmp
