#include "mrmp/relax/builders.hpp"

#include <algorithm>
#include <cmath>

#include "mrmp/model.hpp"

namespace mrmp::relax {

using conic::ConeKind;
using conic::ConeMembership;
using conic::ConicProgram;
using conic::LinExpr;

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::parabolic_simplified:
            return "parabolic";
        case Variant::parabolic_full:
            return "parabolic-full";
        case Variant::sdp:
            return "sdp";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

enum class LiftMode { none, robots_only, robots_and_obstacles, all_entities };

VariableLayout make_layout(const ProblemInstance& instance, Variant variant, double eta,
                           bool fix_obstacle_y, LiftMode lift) {
    VariableLayout layout;
    layout.variant = variant;
    layout.eta = eta;
    layout.fix_obstacle_y = fix_obstacle_y;
    layout.T = instance.T;
    layout.n = instance.n;
    layout.num_robots = static_cast<int>(instance.robots.size());
    layout.num_obstacles = static_cast<int>(instance.obstacles.size());
    if (layout.num_robots == 0) fail("builder: instance has no robots");
    layout.m = instance.robots[0].dynamics.m;
    for (const auto& robot : instance.robots) {
        if (robot.dynamics.m != layout.m || robot.dynamics.m != layout.n)
            fail("builder: robots must be fully actuated (m = n) and homogeneous in m");
    }
    if (eta < 0.0) fail("builder: eta must be nonnegative");

    for (const auto& robot : instance.robots) {
        layout.entity_ordinal[robot.id] = static_cast<int>(layout.robot_ids.size());
        layout.robot_ids.push_back(robot.id);
    }
    for (const auto& obstacle : instance.obstacles) {
        layout.entity_ordinal[obstacle.id] =
            layout.num_robots + static_cast<int>(layout.obstacle_ids.size());
        layout.obstacle_ids.push_back(obstacle.id);
    }

    layout.y_t_begin = 2;
    layout.y_t_end = layout.T;  // empty when T < 2
    layout.pair_t_begin = 2;
    layout.pair_t_end = layout.T;

    switch (lift) {
        case LiftMode::none:
            layout.num_y_entities = 0;
            break;
        case LiftMode::robots_only:
            layout.num_y_entities = layout.num_robots;
            break;
        case LiftMode::robots_and_obstacles:
        case LiftMode::all_entities:
            layout.num_y_entities = layout.num_robots + layout.num_obstacles;
            break;
    }

    const int num_entities = layout.num_robots + layout.num_obstacles;
    if (lift != LiftMode::none) {
        for (int a = 0; a < layout.num_robots; ++a)
            for (int b = a + 1; b < num_entities; ++b) layout.constrained_pairs.emplace_back(a, b);
    }
    if (variant == Variant::parabolic_full) {
        layout.offdiag_pairs = layout.constrained_pairs;
    } else if (variant == Variant::sdp) {
        for (int a = 0; a < num_entities; ++a)
            for (int b = a + 1; b < num_entities; ++b) layout.offdiag_pairs.emplace_back(a, b);
    }
    layout.num_offdiag_pairs = static_cast<int>(layout.offdiag_pairs.size());

    const int y_len = std::max(0, layout.y_t_end - layout.y_t_begin + 1);
    layout.state_base = 0;
    layout.control_base = layout.num_robots * (layout.T + 1) * 2 * layout.n;
    layout.y_base = layout.control_base + layout.num_robots * layout.T * layout.m;
    layout.y_offdiag_base = layout.y_base + layout.num_y_entities * y_len;
    layout.num_base_vars = layout.y_offdiag_base + layout.num_offdiag_pairs * y_len;
    return layout;
}

struct Builder {
    const ProblemInstance& instance;
    VariableLayout& layout;
    ConicProgram& prog;

    const RobotSpec& robot(int ord) const { return instance.robots[ord]; }
    bool is_robot(int ord) const { return ord < layout.num_robots; }
    const ObstacleSpec& obstacle(int ord) const {
        return instance.obstacles[ord - layout.num_robots];
    }
    double radius(int ord) const {
        return is_robot(ord) ? robot(ord).radius : obstacle(ord).radius;
    }

    // Position component k of entity `ord` at step t: a variable for robots,
    // a constant for obstacles.
    LinExpr pos_expr(int ord, int t, int k) const {
        if (is_robot(ord)) return LinExpr::variable(layout.state_index(ord, t) + k);
        return LinExpr(obstacle(ord).states[t - 1](k));
    }
    Vec obstacle_position(int ord, int t) const { return obstacle(ord).states[t - 1].head(layout.n); }

    // Lift diagonal for entity `ord` at step t: a variable where the entity
    // is lifted, otherwise the exact constant ||G x||^2.
    LinExpr y_expr(int ord, int t) const {
        if (layout.has_y(ord)) return LinExpr::variable(layout.y_index(ord, t));
        return LinExpr(obstacle_position(ord, t).squaredNorm());
    }

    void add_base() {
        const int n = layout.n, m = layout.m, T = layout.T;
        prog.num_vars = layout.num_base_vars;

        for (int r = 0; r < layout.num_robots; ++r) {
            const auto& dyn = robot(r).dynamics;
            for (int t = 1; t <= T; ++t) {
                for (int i = 0; i < 2 * n; ++i) {
                    LinExpr row = LinExpr::variable(layout.state_index(r, t + 1) + i);
                    for (int j = 0; j < 2 * n; ++j)
                        row.add(layout.state_index(r, t) + j, -dyn.A(i, j));
                    for (int j = 0; j < m; ++j)
                        row.add(layout.control_index(r, t) + j, -dyn.B(i, j));
                    prog.add_equality(std::move(row));
                    ++layout.rows_dynamics;
                }
            }
            for (int i = 0; i < 2 * n; ++i) {
                LinExpr first = LinExpr::variable(layout.state_index(r, 1) + i);
                first.constant = -robot(r).x_init(i);
                prog.add_equality(std::move(first));
                LinExpr last = LinExpr::variable(layout.state_index(r, T + 1) + i);
                last.constant = -robot(r).x_goal(i);
                prog.add_equality(std::move(last));
                layout.rows_boundary += 2;
            }
        }

        // Fuel objective epigraphs and control-bound cones. With q = p = 1
        // the per-component |u| variables serve both.
        for (int r = 0; r < layout.num_robots; ++r) {
            for (int t = 1; t <= T; ++t) {
                std::vector<int> abs_vars;
                if (instance.q == 1) {
                    for (int k = 0; k < m; ++k) {
                        const LinExpr uk = LinExpr::variable(layout.control_index(r, t) + k);
                        const int s = conic::add_abs_epigraph(prog, uk);
                        layout.aux.push_back({s, true, {uk}});
                        prog.add_objective_term(s, 1.0);
                        abs_vars.push_back(s);
                    }
                } else {
                    std::vector<LinExpr> comps;
                    for (int k = 0; k < m; ++k)
                        comps.push_back(LinExpr::variable(layout.control_index(r, t) + k));
                    const int s = conic::add_norm2_epigraph(prog, comps);
                    layout.aux.push_back({s, false, comps});
                    prog.add_objective_term(s, 1.0);
                }

                if (instance.p == 1) {
                    if (abs_vars.empty()) {
                        for (int k = 0; k < m; ++k) {
                            const LinExpr uk = LinExpr::variable(layout.control_index(r, t) + k);
                            const int s = conic::add_abs_epigraph(prog, uk);
                            layout.aux.push_back({s, true, {uk}});
                            abs_vars.push_back(s);
                        }
                    }
                    LinExpr row(robot(r).u_max);
                    for (int s : abs_vars) row.add(s, -1.0);
                    prog.add_nonnegative(std::move(row));
                } else {
                    ConeMembership cone{ConeKind::second_order, {}};
                    cone.exprs.push_back(LinExpr(robot(r).u_max));
                    for (int k = 0; k < m; ++k)
                        cone.exprs.push_back(LinExpr::variable(layout.control_index(r, t) + k));
                    prog.add_cone(std::move(cone));
                }
                ++layout.count_control_cones;
            }
        }
    }

    // eta * sum over lifted entities and t in the lift range of
    // (Y_ii[t] - 2 xref' G'G x_i[t]), plus the boundary-step terms folded as
    // constants (Y there is pinned at the exact squared norm).
    void add_penalty(const SeedPositions& seed) {
        const double eta = layout.eta;
        if (eta == 0.0) return;
        const int T = layout.T, n = layout.n;

        for (int r = 0; r < layout.num_robots; ++r) {
            const auto& positions = seed.at(robot(r).id);
            for (int t = layout.y_t_begin; t <= layout.y_t_end; ++t) {
                prog.add_objective_term(layout.y_index(r, t), eta);
                for (int k = 0; k < n; ++k)
                    prog.add_objective_term(layout.state_index(r, t) + k,
                                            -2.0 * eta * positions[t - 1](k));
            }
            const Vec p_init = robot(r).x_init.head(n);
            prog.objective_constant +=
                eta * (p_init.squaredNorm() - 2.0 * positions[0].dot(p_init));
        }
        // Pinned obstacles (fix_obstacle_y) contribute only a constant, which
        // is dropped: keeping it would inflate the objective magnitude that
        // the relative stopping rule divides by. Lifted obstacles keep their
        // variable part and the matching constant.
        for (int o = layout.num_robots; o < layout.num_robots + layout.num_obstacles; ++o) {
            if (!layout.has_y(o)) continue;
            prog.objective_constant -= eta * obstacle_position(o, 1).squaredNorm();
            for (int t = layout.y_t_begin; t <= layout.y_t_end; ++t) {
                prog.add_objective_term(layout.y_index(o, t), eta);
                prog.objective_constant -= 2.0 * eta * obstacle_position(o, t).squaredNorm();
            }
        }
    }

    void add_diag_cones() {
        for (int e = 0; e < layout.num_y_entities; ++e) {
            for (int t = layout.y_t_begin; t <= layout.y_t_end; ++t) {
                std::vector<LinExpr> pos;
                for (int k = 0; k < layout.n; ++k) pos.push_back(pos_expr(e, t, k));
                conic::add_quadratic_upper_bound(prog, y_expr(e, t), pos);
                ++layout.count_diag_cones;
            }
        }
    }

    void add_simplified_pairwise() {
        for (const auto& [a, b] : layout.constrained_pairs) {
            const double rsum = radius(a) + radius(b);
            for (int t = layout.pair_t_begin; t <= layout.pair_t_end; ++t) {
                LinExpr lin = y_expr(a, t).scaled(2.0);
                lin.add(y_expr(b, t), 2.0);
                lin.constant -= rsum * rsum;
                std::vector<LinExpr> sum_pos;
                for (int k = 0; k < layout.n; ++k) {
                    LinExpr s = pos_expr(a, t, k);
                    s.add(pos_expr(b, t, k), 1.0);
                    sum_pos.push_back(std::move(s));
                }
                conic::add_quadratic_upper_bound(prog, lin, sum_pos);
                ++layout.count_pairwise_cones;
            }
        }
    }

    LinExpr y_pair_expr(int pair_ord, int t) const {
        return LinExpr::variable(layout.y_offdiag_index(pair_ord, t));
    }

    void add_full_parabolic_rows() {
        for (size_t pi = 0; pi < layout.offdiag_pairs.size(); ++pi) {
            const auto [a, b] = layout.offdiag_pairs[pi];
            const double rsum = radius(a) + radius(b);
            for (int t = layout.pair_t_begin; t <= layout.pair_t_end; ++t) {
                LinExpr diag_sum = y_expr(a, t);
                diag_sum.add(y_expr(b, t), 1.0);

                LinExpr lin_plus = diag_sum;
                lin_plus.add(y_pair_expr(static_cast<int>(pi), t), 2.0);
                std::vector<LinExpr> sum_pos, diff_pos;
                for (int k = 0; k < layout.n; ++k) {
                    LinExpr s = pos_expr(a, t, k);
                    s.add(pos_expr(b, t, k), 1.0);
                    sum_pos.push_back(std::move(s));
                    LinExpr d = pos_expr(a, t, k);
                    d.add(pos_expr(b, t, k), -1.0);
                    diff_pos.push_back(std::move(d));
                }
                conic::add_quadratic_upper_bound(prog, lin_plus, sum_pos);

                LinExpr lin_minus = diag_sum;
                lin_minus.add(y_pair_expr(static_cast<int>(pi), t), -2.0);
                conic::add_quadratic_upper_bound(prog, lin_minus, diff_pos);
                ++layout.count_parabolic_pairs;

                LinExpr row = diag_sum;
                row.add(y_pair_expr(static_cast<int>(pi), t), -2.0);
                row.constant -= rsum * rsum;
                prog.add_nonnegative(std::move(row));
                ++layout.rows_linear_collision;
            }
        }
    }

    int offdiag_pair_ordinal(int a, int b) const {
        // offdiag_pairs is ordered lexicographically; for the sdp variant it
        // covers all pairs so the index is closed-form.
        const int ne = layout.num_robots + layout.num_obstacles;
        return a * ne - a * (a + 1) / 2 + (b - a - 1);
    }

    void add_sdp_blocks() {
        const int ne = layout.num_robots + layout.num_obstacles;
        const int n = layout.n;
        for (int t = layout.pair_t_begin; t <= layout.pair_t_end; ++t) {
            ConeMembership block{ConeKind::psd, {}};
            const int d = ne + n;
            block.exprs.reserve(d * (d + 1) / 2);
            for (int c = 0; c < d; ++c) {
                for (int r = c; r < d; ++r) {
                    if (c < ne && r < ne) {
                        if (r == c)
                            block.exprs.push_back(y_expr(r, t));
                        else
                            block.exprs.push_back(y_pair_expr(offdiag_pair_ordinal(c, r), t));
                    } else if (c < ne) {
                        block.exprs.push_back(pos_expr(c, t, r - ne));
                    } else {
                        block.exprs.push_back(LinExpr(r == c ? 1.0 : 0.0));
                    }
                }
            }
            prog.add_cone(std::move(block));
            ++layout.count_psd_blocks;
        }
        for (const auto& [a, b] : layout.constrained_pairs) {
            const double rsum = radius(a) + radius(b);
            for (int t = layout.pair_t_begin; t <= layout.pair_t_end; ++t) {
                LinExpr row = y_expr(a, t);
                row.add(y_expr(b, t), 1.0);
                row.add(y_pair_expr(offdiag_pair_ordinal(a, b), t), -2.0);
                row.constant -= rsum * rsum;
                prog.add_nonnegative(std::move(row));
                ++layout.rows_linear_collision;
            }
        }
    }
};

void check_seed(const ProblemInstance& instance, const SeedPositions& seed) {
    for (const auto& robot : instance.robots) {
        const auto it = seed.find(robot.id);
        if (it == seed.end()) fail("builder: seed missing robot " + std::to_string(robot.id));
        if (static_cast<int>(it->second.size()) != instance.T + 1)
            fail("builder: seed for robot " + std::to_string(robot.id) + " must have T+1 entries");
        for (const Vec& p : it->second)
            if (p.size() != instance.n || !p.allFinite()) fail("builder: bad seed position");
    }
}

}  // namespace

BuiltProgram build_base_program(const ProblemInstance& instance) {
    BuiltProgram built;
    built.layout = make_layout(instance, Variant::parabolic_simplified, 0.0, true, LiftMode::none);
    Builder b{instance, built.layout, built.program};
    b.add_base();
    built.layout.num_vars = built.program.num_vars;
    return built;
}

BuiltProgram build_penalized_parabolic(const ProblemInstance& instance, const SeedPositions& seed,
                                       const RelaxationConfig& config) {
    if (config.variant != Variant::parabolic_simplified)
        fail("build_penalized_parabolic: config.variant mismatch");
    check_seed(instance, seed);
    BuiltProgram built;
    built.layout = make_layout(instance, config.variant, config.eta, config.fix_obstacle_y,
                               config.fix_obstacle_y ? LiftMode::robots_only
                                                     : LiftMode::robots_and_obstacles);
    Builder b{instance, built.layout, built.program};
    b.add_base();
    b.add_diag_cones();
    b.add_simplified_pairwise();
    b.add_penalty(seed);
    built.layout.num_vars = built.program.num_vars;
    return built;
}

BuiltProgram build_full_parabolic(const ProblemInstance& instance, const SeedPositions& seed,
                                  const RelaxationConfig& config) {
    if (config.variant != Variant::parabolic_full)
        fail("build_full_parabolic: config.variant mismatch");
    check_seed(instance, seed);
    BuiltProgram built;
    built.layout = make_layout(instance, config.variant, config.eta, config.fix_obstacle_y,
                               config.fix_obstacle_y ? LiftMode::robots_only
                                                     : LiftMode::robots_and_obstacles);
    Builder b{instance, built.layout, built.program};
    b.add_base();
    b.add_diag_cones();
    b.add_full_parabolic_rows();
    b.add_penalty(seed);
    built.layout.num_vars = built.program.num_vars;
    return built;
}

BuiltProgram build_sdp(const ProblemInstance& instance, const SeedPositions& seed,
                       const RelaxationConfig& config) {
    if (config.variant != Variant::sdp) fail("build_sdp: config.variant mismatch");
    check_seed(instance, seed);
    BuiltProgram built;
    // The Schur block needs every diagonal entry as a variable: pinning
    // obstacle diagonals would force their cross terms exact and tighten the
    // relaxation, so fix_obstacle_y does not apply here.
    built.layout = make_layout(instance, config.variant, config.eta, false, LiftMode::all_entities);
    Builder b{instance, built.layout, built.program};
    b.add_base();
    b.add_sdp_blocks();
    b.add_penalty(seed);
    built.layout.num_vars = built.program.num_vars;
    return built;
}

BuiltProgram build_relaxation(const ProblemInstance& instance, const SeedPositions& seed,
                              const RelaxationConfig& config) {
    switch (config.variant) {
        case Variant::parabolic_simplified:
            return build_penalized_parabolic(instance, seed, config);
        case Variant::parabolic_full:
            return build_full_parabolic(instance, seed, config);
        case Variant::sdp:
            return build_sdp(instance, seed, config);
    }
    fail("unknown variant");
}

LiftedIterate extract_iterate(const VariableLayout& layout, const conic::BackendResult& result,
                              const ProblemInstance& instance) {
    if (result.status != conic::SolveStatus::optimal)
        throw std::invalid_argument("extract_iterate: result is not optimal");
    const Vec& z = result.primal;
    LiftedIterate it;
    const int T = layout.T, n = layout.n, m = layout.m;

    for (int r = 0; r < layout.num_robots; ++r) {
        const int id = layout.robot_ids[r];
        std::vector<Vec> xs(T + 1), us(T);
        for (int t = 1; t <= T + 1; ++t) xs[t - 1] = z.segment(layout.state_index(r, t), 2 * n);
        for (int t = 1; t <= T; ++t) us[t - 1] = z.segment(layout.control_index(r, t), m);
        it.states[id] = std::move(xs);
        it.controls[id] = std::move(us);
    }
    for (const auto& obstacle : instance.obstacles) it.states[obstacle.id] = obstacle.states;

    const int num_entities = layout.num_robots + layout.num_obstacles;
    for (int e = 0; e < num_entities; ++e) {
        const int id = e < layout.num_robots ? layout.robot_ids[e]
                                             : layout.obstacle_ids[e - layout.num_robots];
        std::vector<double> y(T + 1);
        for (int t = 1; t <= T + 1; ++t) {
            if (layout.has_y(e) && t >= layout.y_t_begin && t <= layout.y_t_end)
                y[t - 1] = z(layout.y_index(e, t));
            else
                y[t - 1] = it.states.at(id)[t - 1].head(n).squaredNorm();
        }
        it.y_diag[id] = std::move(y);
    }

    if (layout.variant != Variant::parabolic_simplified && layout.num_offdiag_pairs >= 0 &&
        (layout.variant == Variant::parabolic_full || layout.variant == Variant::sdp)) {
        it.has_y_full = true;
        it.y_full.assign(T + 1, Mat(num_entities, num_entities));
        auto exact_cross = [&](int a, int b, int t) {
            const int ida = a < layout.num_robots ? layout.robot_ids[a]
                                                  : layout.obstacle_ids[a - layout.num_robots];
            const int idb = b < layout.num_robots ? layout.robot_ids[b]
                                                  : layout.obstacle_ids[b - layout.num_robots];
            return it.states.at(ida)[t - 1].head(n).dot(it.states.at(idb)[t - 1].head(n));
        };
        for (int t = 1; t <= T + 1; ++t) {
            Mat& Y = it.y_full[t - 1];
            for (int a = 0; a < num_entities; ++a) {
                const int ida = a < layout.num_robots
                                    ? layout.robot_ids[a]
                                    : layout.obstacle_ids[a - layout.num_robots];
                Y(a, a) = it.y_diag.at(ida)[t - 1];
                for (int b = a + 1; b < num_entities; ++b) {
                    double v = exact_cross(a, b, t);
                    if (t >= layout.y_t_begin && t <= layout.y_t_end) {
                        const auto pos = std::find(layout.offdiag_pairs.begin(),
                                                   layout.offdiag_pairs.end(), std::make_pair(a, b));
                        if (pos != layout.offdiag_pairs.end()) {
                            const int pi = static_cast<int>(pos - layout.offdiag_pairs.begin());
                            v = z(layout.y_offdiag_index(pi, t));
                        }
                    }
                    Y(a, b) = v;
                    Y(b, a) = v;
                }
            }
        }
    }
    return it;
}

Vec pack_iterate(const VariableLayout& layout, const LiftedIterate& iterate,
                 const ProblemInstance& instance) {
    Vec z = Vec::Zero(layout.num_vars);
    const int T = layout.T, n = layout.n, m = layout.m;
    for (int r = 0; r < layout.num_robots; ++r) {
        const int id = layout.robot_ids[r];
        const auto& xs = iterate.states.at(id);
        const auto& us = iterate.controls.at(id);
        for (int t = 1; t <= T + 1; ++t) z.segment(layout.state_index(r, t), 2 * n) = xs[t - 1];
        for (int t = 1; t <= T; ++t) z.segment(layout.control_index(r, t), m) = us[t - 1];
    }
    for (int e = 0; e < layout.num_y_entities; ++e) {
        const int id = e < layout.num_robots ? layout.robot_ids[e]
                                             : layout.obstacle_ids[e - layout.num_robots];
        const auto& y = iterate.y_diag.at(id);
        for (int t = layout.y_t_begin; t <= layout.y_t_end; ++t) z(layout.y_index(e, t)) = y[t - 1];
    }
    for (size_t pi = 0; pi < layout.offdiag_pairs.size(); ++pi) {
        const auto [a, b] = layout.offdiag_pairs[pi];
        for (int t = layout.y_t_begin; t <= layout.y_t_end; ++t) {
            double v;
            if (iterate.has_y_full) {
                v = iterate.y_full[t - 1](a, b);
            } else {
                // Exact product fallback.
                const int ida = a < layout.num_robots
                                    ? layout.robot_ids[a]
                                    : layout.obstacle_ids[a - layout.num_robots];
                const int idb = b < layout.num_robots
                                    ? layout.robot_ids[b]
                                    : layout.obstacle_ids[b - layout.num_robots];
                v = iterate.states.at(ida)[t - 1].head(n).dot(iterate.states.at(idb)[t - 1].head(n));
            }
            z(layout.y_offdiag_index(static_cast<int>(pi), t)) = v;
        }
    }
    for (const auto& aux : layout.aux) {
        if (aux.is_abs) {
            z(aux.var) = std::abs(aux.exprs[0].value(z));
        } else {
            double sq = 0.0;
            for (const auto& e : aux.exprs) {
                const double v = e.value(z);
                sq += v * v;
            }
            z(aux.var) = std::sqrt(sq);
        }
    }
    return z;
}

GapReport relaxation_gap(const LiftedIterate& iterate, const ProblemInstance& instance) {
    GapReport report;
    const int n = instance.n;
    for (const auto& robot : instance.robots) {
        const auto& xs = iterate.states.at(robot.id);
        const auto& ys = iterate.y_diag.at(robot.id);
        std::vector<double> gaps(xs.size());
        for (size_t k = 0; k < xs.size(); ++k) {
            gaps[k] = ys[k] - xs[k].head(n).squaredNorm();
            report.max_gap = std::max(report.max_gap, gaps[k]);
            report.sum_gap += gaps[k];
        }
        report.gaps[robot.id] = std::move(gaps);
    }
    return report;
}

LiftedIterate exact_lift(const Solution& solution, const ProblemInstance& instance,
                         bool with_full_matrix) {
    LiftedIterate it;
    it.states = solution.states;
    it.controls = solution.controls;
    const int n = instance.n;
    for (const auto& [id, xs] : solution.states) {
        std::vector<double> y(xs.size());
        for (size_t k = 0; k < xs.size(); ++k) y[k] = xs[k].head(n).squaredNorm();
        it.y_diag[id] = std::move(y);
    }
    if (with_full_matrix) {
        it.has_y_full = true;
        std::vector<int> ids;
        for (const auto& robot : instance.robots) ids.push_back(robot.id);
        for (const auto& obstacle : instance.obstacles) ids.push_back(obstacle.id);
        const int ne = static_cast<int>(ids.size());
        it.y_full.assign(instance.T + 1, Mat(ne, ne));
        for (int t = 0; t <= instance.T; ++t) {
            for (int a = 0; a < ne; ++a)
                for (int b = 0; b < ne; ++b)
                    it.y_full[t](a, b) = solution.states.at(ids[a])[t].head(n).dot(
                        solution.states.at(ids[b])[t].head(n));
        }
    }
    return it;
}

}  // namespace mrmp::relax
