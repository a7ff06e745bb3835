#pragma once

#include <string>

#include "mrmp/sequential.hpp"

namespace mrmp {

// SolveReport as JSON: per-iteration array, termination, embedded solution.
void save_report_json(const ProblemInstance& instance, const SolveReport& report,
                      const std::string& path);

// Convergence trace CSV: iter,true_objective,penalized_objective,max_gap,
// collision_violation,time.
void save_report_csv(const SolveReport& report, const std::string& path);
std::string report_csv_string(const SolveReport& report);

}  // namespace mrmp
