#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "mrmp/conic/program.hpp"

namespace mrmp::conic {

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure, iteration_limit };

const char* solve_status_name(SolveStatus status);

struct BackendResult {
    SolveStatus status = SolveStatus::numerical_failure;
    Vec primal;  // populated iff status == optimal
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    double solve_time = 0.0;  // seconds
    int iterations = 0;
};

// Raised before solving when a program uses a cone the backend cannot handle.
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual bool supports(ConeKind kind) const = 0;
    virtual BackendResult solve_raw(const ConicProgram& prog) = 0;
};

// Validates the program, checks cone capabilities, delegates to the backend,
// and certifies any "optimal" answer against ConicProgram::residuals: points
// violating equalities or cones by more than 1e-6 are demoted to
// numerical_failure rather than passed through.
BackendResult solve(const ConicProgram& prog, Backend& backend);

}  // namespace mrmp::conic
