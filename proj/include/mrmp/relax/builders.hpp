#pragma once

#include <optional>

#include "mrmp/conic/backend.hpp"
#include "mrmp/types.hpp"

namespace mrmp::relax {

enum class Variant { parabolic_simplified, parabolic_full, sdp };

const char* variant_name(Variant v);

struct RelaxationConfig {
    Variant variant = Variant::parabolic_simplified;
    double eta = 50.0;  // penalty weight; >= 0, 0 only for relaxation-gap studies
    bool fix_obstacle_y = true;
};

// Solution of a lifted subproblem mapped back to named quantities. y entries
// at the pinned boundary steps carry the exact squared position norms, so
// gaps there are zero by construction.
struct LiftedIterate {
    std::map<int, std::vector<Vec>> states;        // every entity, T+1 states
    std::map<int, std::vector<Vec>> controls;      // robots, T controls
    std::map<int, std::vector<double>> y_diag;     // per lifted entity, T+1 values
    std::vector<Mat> y_full;                       // per t (size T+1), |N| x |N|; only some variants
    bool has_y_full = false;
};

struct GapReport {
    std::map<int, std::vector<double>> gaps;  // robot id -> T+1 gaps
    double max_gap = 0.0;
    double sum_gap = 0.0;
};

// Index map of a built program plus the bookkeeping tests assert against.
struct VariableLayout {
    Variant variant = Variant::parabolic_simplified;
    double eta = 50.0;
    bool fix_obstacle_y = true;
    int T = 0, n = 0, m = 0;
    int num_robots = 0, num_obstacles = 0;

    // Inclusive 1-based time ranges actually carrying lifted variables and
    // pairwise constraints. Both are {2..T}: boundary steps are pinned by the
    // endpoint equalities and validated separately, so their rows are folded
    // into constants.
    int y_t_begin = 2, y_t_end = 0;
    int pair_t_begin = 2, pair_t_end = 0;

    std::vector<int> robot_ids;     // ordinal -> id
    std::vector<int> obstacle_ids;  // ordinal -> id
    std::map<int, int> entity_ordinal;  // id -> 0..|N|-1, robots first

    int state_base = 0, control_base = 0, y_base = 0, y_offdiag_base = 0;
    int num_y_entities = 0;    // entities carrying diagonal lift variables
    int num_offdiag_pairs = 0;
    int num_base_vars = 0;     // states + controls + lift entries
    int num_vars = 0;          // including epigraph auxiliaries

    // Pairs carrying separation constraints: robot-robot and robot-obstacle.
    std::vector<std::pair<int, int>> constrained_pairs;  // entity ordinals, first < |R|
    // Pairs carrying off-diagonal lift variables (variant dependent).
    std::vector<std::pair<int, int>> offdiag_pairs;

    // Constraint bookkeeping.
    int rows_dynamics = 0, rows_boundary = 0;
    int count_control_cones = 0;
    int count_diag_cones = 0;      // lift-diagonal quadratic bounds
    int count_pairwise_cones = 0;  // simplified pairwise quadratic bounds
    int count_parabolic_pairs = 0; // full-variant cone pairs (one per (5a)/(5b))
    int rows_linear_collision = 0; // lifted linear separation rows
    int count_psd_blocks = 0;
    double objective_constant = 0.0;

    struct AuxDef {
        int var;
        bool is_abs;  // abs epigraph of exprs[0], else norm epigraph of exprs
        std::vector<conic::LinExpr> exprs;
    };
    std::vector<AuxDef> aux;

    int state_index(int robot_ord, int t) const {  // t in 1..T+1
        return state_base + (robot_ord * (T + 1) + (t - 1)) * 2 * n;
    }
    int control_index(int robot_ord, int t) const {  // t in 1..T
        return control_base + (robot_ord * T + (t - 1)) * m;
    }
    bool has_y(int entity_ord) const {
        return entity_ord < num_y_entities;
    }
    int y_index(int entity_ord, int t) const {  // t in y range
        return y_base + entity_ord * (y_t_end - y_t_begin + 1) + (t - y_t_begin);
    }
    int y_offdiag_index(int pair_ord, int t) const {
        return y_offdiag_base + pair_ord * (y_t_end - y_t_begin + 1) + (t - y_t_begin);
    }
};

struct BuiltProgram {
    conic::ConicProgram program;
    VariableLayout layout;
};

// The convex core shared by every pipeline: dynamics and boundary
// equalities, control-bound cones, and the fuel objective. No collision
// handling; this doubles as the direct-solve oracle for collision-free
// instances.
BuiltProgram build_base_program(const ProblemInstance& instance);

BuiltProgram build_penalized_parabolic(const ProblemInstance& instance,
                                       const SeedPositions& seed, const RelaxationConfig& config);
BuiltProgram build_full_parabolic(const ProblemInstance& instance, const SeedPositions& seed,
                                  const RelaxationConfig& config);
BuiltProgram build_sdp(const ProblemInstance& instance, const SeedPositions& seed,
                       const RelaxationConfig& config);

// Dispatch on config.variant.
BuiltProgram build_relaxation(const ProblemInstance& instance, const SeedPositions& seed,
                              const RelaxationConfig& config);

LiftedIterate extract_iterate(const VariableLayout& layout, const conic::BackendResult& result,
                              const ProblemInstance& instance);

// Inverse of extract_iterate: packs named quantities (plus recomputed
// epigraph auxiliaries) into a primal vector. Test and oracle plumbing.
Vec pack_iterate(const VariableLayout& layout, const LiftedIterate& iterate,
                 const ProblemInstance& instance);

GapReport relaxation_gap(const LiftedIterate& iterate, const ProblemInstance& instance);

// Lifts a solution exactly: y = ||G x||^2, off-diagonals the exact products.
LiftedIterate exact_lift(const Solution& solution, const ProblemInstance& instance,
                         bool with_full_matrix);

// Penalized objective value of an iterate under a given seed (fuel + eta *
// lift penalty), matching what the built program's objective evaluates to.
double penalized_objective(const ProblemInstance& instance, const LiftedIterate& iterate,
                           const SeedPositions& seed, const VariableLayout& layout);

}  // namespace mrmp::relax
