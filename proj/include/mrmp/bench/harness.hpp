#pragma once

#include <vector>

#include "mrmp/bench/generators.hpp"
#include "mrmp/conic/ipm.hpp"
#include "mrmp/sequential.hpp"

namespace mrmp::bench {

struct HarnessParams {
    InstanceParams instance;
    double entity_diameter = 0.1;
    int max_placement_attempts = 10000;
    double eta = 50.0;
    double rel_obj_tol = 1e-4;
    int max_iters = 200;
    bool fix_obstacle_y = true;
    bool parallel = true;  // trials are independent; aggregation is ordered
};

// "parabolic", "parabolic-full", "sdp" (sequential driver variants) or
// "scp". The long names parabolic_simplified / parabolic_full are accepted
// as aliases.
bool is_known_method(const std::string& name);

struct TrialRecord {
    int group = 0;  // obstacle count (success-rate) or robot count (scaling)
    int trial = 0;
    uint64_t rng_seed = 0;
    std::string method;
    std::string status;  // termination name or "generation_failure"
    bool generated = false;
    bool feasible = false;  // per model::verify on the final solution
    double objective = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    double total_time = 0.0;
    double mean_subproblem_time = 0.0;
    double final_max_gap = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult {
    std::vector<TrialRecord> records;  // sorted (group, trial, method)
    std::string csv;                   // aggregate table, stable columns
    int generation_failures = 0;
    std::string rng_algorithm;         // recorded for reproducibility
};

// Success-rate sweep over obstacle densities with a shared straight-line
// seed per trial. Columns: obstacles,method,trials,successes,success_rate,
// mean_objective,mean_time. mean_objective averages over trials where every
// method succeeded.
ExperimentResult run_success_rate(const std::vector<std::string>& methods,
                                  const std::vector<int>& obstacle_counts, int num_robots,
                                  int trials, uint64_t base_rng_seed, const HarnessParams& params);

// Robot-count scaling on obstacle-free maps. Columns: robots,dimension,
// variant,mean_subproblem_time,mean_total_time,converged_fraction.
ExperimentResult run_scaling(const std::vector<std::string>& variants,
                             const std::vector<int>& robot_counts, int dimension, int trials,
                             uint64_t base_rng_seed, const HarnessParams& params);

// Sequential solve from an adversarial seed; thin wrapper so harness
// parameters apply uniformly.
SolveReport run_bad_seed_recovery(const ProblemInstance& instance,
                                  const SeedPositions& adversarial_seed,
                                  const HarnessParams& params);

// Solve dispatch shared by the harnesses and the CLI.
SolveReport run_method(const std::string& method, const ProblemInstance& instance,
                       const std::optional<SeedPositions>& seed, const HarnessParams& params,
                       conic::Backend& backend);

}  // namespace mrmp::bench
