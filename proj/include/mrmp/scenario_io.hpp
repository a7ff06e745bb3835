#pragma once

#include <string>

#include "mrmp/types.hpp"

namespace mrmp {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario JSON: version 1, shared n/T/p/q/dt, robots with boundary states
// and optional row-major A/B (absent means the built-in double integrator
// with dt), obstacles with flat (T+1) x 2n row-major state arrays.
ProblemInstance load_scenario(const std::string& path);
void save_scenario(const ProblemInstance& instance, const std::string& path);

// Solution JSON: objective, per-id flat state/control arrays, embedded
// feasibility report.
void save_solution(const ProblemInstance& instance, const Solution& solution,
                   const FeasibilityReport& report, const std::string& path);
Solution load_solution(const ProblemInstance& instance, const std::string& path);

}  // namespace mrmp
