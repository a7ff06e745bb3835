#include "mrmp/scp.hpp"

#include <chrono>
#include <cmath>

#include "mrmp/model.hpp"

namespace mrmp {

using conic::ConeKind;
using conic::ConeMembership;
using conic::LinExpr;

HalfSpace linearize_collision(const Vec& xi_ref, const Vec& xj_ref, double r_sum,
                              const Vec& degenerate_direction) {
    Vec d = xi_ref - xj_ref;
    const double norm = d.norm();
    HalfSpace hs;
    hs.normal = (norm < 1e-9) ? degenerate_direction : Vec(d / norm);
    hs.offset = r_sum;
    return hs;
}

namespace {

SeedPositions solution_positions(const relax::LiftedIterate& iterate,
                                 const ProblemInstance& instance) {
    SeedPositions positions;
    for (const auto& robot : instance.robots) {
        const auto& xs = iterate.states.at(robot.id);
        std::vector<Vec> ps(xs.size());
        for (size_t k = 0; k < xs.size(); ++k) ps[k] = xs[k].head(instance.n);
        positions[robot.id] = std::move(ps);
    }
    return positions;
}

}  // namespace

SolveReport solve_scp(const ProblemInstance& instance, const std::optional<SeedPositions>& seed,
                      const ScpConfig& config, conic::Backend& backend) {
    const auto t0 = std::chrono::steady_clock::now();
    instance.validate();

    SolveReport report;
    report.method = "scp";
    SeedPositions reference = seed.has_value() ? *seed : straight_line_seed(instance);
    const Vec fallback = config.direction_or_default(instance.n);
    const int n = instance.n;

    double prev_objective = std::numeric_limits<double>::quiet_NaN();

    for (int k = 1; k <= config.max_iters; ++k) {
        auto built = relax::build_base_program(instance);
        auto& prog = built.program;
        const auto& layout = built.layout;

        // Linearized separation rows about the current reference for every
        // robot-robot and robot-obstacle pair at the interior steps.
        for (int a = 0; a < layout.num_robots; ++a) {
            const auto& ra = instance.robots[a];
            const auto& ref_a = reference.at(ra.id);
            for (int b = a + 1; b < layout.num_robots + layout.num_obstacles; ++b) {
                const bool b_robot = b < layout.num_robots;
                const double rsum =
                    ra.radius + (b_robot ? instance.robots[b].radius
                                         : instance.obstacles[b - layout.num_robots].radius);
                for (int t = 2; t <= instance.T; ++t) {
                    const Vec pa = ref_a[t - 1];
                    const Vec pb = b_robot
                                       ? reference.at(instance.robots[b].id)[t - 1]
                                       : Vec(instance.obstacles[b - layout.num_robots]
                                                 .states[t - 1]
                                                 .head(n));
                    const HalfSpace hs = linearize_collision(pa, pb, rsum, fallback);
                    LinExpr row(-hs.offset);
                    for (int kdim = 0; kdim < n; ++kdim) {
                        row.add(layout.state_index(a, t) + kdim, hs.normal(kdim));
                        if (b_robot)
                            row.add(layout.state_index(b, t) + kdim, -hs.normal(kdim));
                        else
                            row.constant -= hs.normal(kdim) * pb(kdim);
                    }
                    prog.add_nonnegative(std::move(row));
                }
            }
        }

        if (config.trust_region.has_value()) {
            for (int r = 0; r < layout.num_robots; ++r) {
                const auto& ref = reference.at(instance.robots[r].id);
                for (int t = 2; t <= instance.T; ++t) {
                    ConeMembership cone{ConeKind::second_order, {}};
                    cone.exprs.push_back(LinExpr(*config.trust_region));
                    for (int kdim = 0; kdim < n; ++kdim) {
                        LinExpr diff = LinExpr::variable(layout.state_index(r, t) + kdim);
                        diff.constant = -ref[t - 1](kdim);
                        cone.exprs.push_back(std::move(diff));
                    }
                    prog.add_cone(std::move(cone));
                }
            }
        }

        const auto result = conic::solve(prog, backend);
        if (result.status != conic::SolveStatus::optimal) {
            report.termination = Termination::subproblem_failure;
            break;
        }

        const auto iterate = relax::extract_iterate(layout, result, instance);
        Solution solution;
        solution.states = iterate.states;
        solution.controls = iterate.controls;
        solution.objective = evaluate_objective(instance, solution);
        const auto feas = verify(instance, solution, config.feasibility_tolerances);

        IterationRecord record;
        record.iter = k;
        record.true_objective = solution.objective;
        record.penalized_objective = result.objective_value;
        record.max_gap = std::numeric_limits<double>::quiet_NaN();  // no lifted variables
        record.collision_violation = feas.collision_violation;
        record.subproblem_time = result.solve_time;
        record.verify_feasible = feas.feasible;
        report.iterations.push_back(record);

        report.final_solution = std::move(solution);
        report.feasible = feas.feasible;

        if (k >= 2 && stopping_criterion(prev_objective, record.penalized_objective,
                                         config.rel_obj_tol)) {
            report.termination = Termination::converged;
            break;
        }
        prev_objective = record.penalized_objective;
        reference = solution_positions(iterate, instance);
        if (k == config.max_iters) report.termination = Termination::max_iters;
    }
    report.total_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace mrmp
