#pragma once

#include "mrmp/sequential.hpp"

namespace mrmp {

struct ScpConfig {
    double rel_obj_tol = 1e-4;
    int max_iters = 200;
    std::optional<double> trust_region;  // per-step position-move bound, meters
    Vec degenerate_direction;            // used when reference positions coincide
    Tolerances feasibility_tolerances;

    Vec direction_or_default(int n) const {
        if (degenerate_direction.size() == n) return degenerate_direction;
        Vec e = Vec::Zero(n);
        e(0) = 1.0;
        return e;
    }
};

struct HalfSpace {
    Vec normal;    // unit vector a
    double offset; // a'(x_i - x_j) >= offset
};

// Supporting half-space of { ||xi - xj|| >= r_sum } at the reference pair.
// Any point satisfying it satisfies the original separation constraint.
HalfSpace linearize_collision(const Vec& xi_ref, const Vec& xj_ref, double r_sum,
                              const Vec& degenerate_direction);

// Sequential convex programming baseline: fuel objective, dynamics, bounds,
// and collision constraints linearized about the current reference. Expected
// to fail with infeasible subproblems in dense maps.
SolveReport solve_scp(const ProblemInstance& instance, const std::optional<SeedPositions>& seed,
                      const ScpConfig& config, conic::Backend& backend);

}  // namespace mrmp
