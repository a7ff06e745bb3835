#pragma once

#include <string>
#include <vector>

#include "mrmp/types.hpp"

namespace mrmp::conic {

struct LinTerm {
    int var = 0;
    double coeff = 0.0;
};

// Sparse affine expression: sum_k coeff_k * z[var_k] + constant.
struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    LinExpr() = default;
    explicit LinExpr(double c) : constant(c) {}

    static LinExpr variable(int var, double coeff = 1.0) {
        LinExpr e;
        e.terms.push_back({var, coeff});
        return e;
    }

    LinExpr& add(int var, double coeff) {
        if (coeff != 0.0) terms.push_back({var, coeff});
        return *this;
    }
    LinExpr& add(const LinExpr& other, double scale = 1.0) {
        for (const auto& t : other.terms) add(t.var, scale * t.coeff);
        constant += scale * other.constant;
        return *this;
    }
    LinExpr scaled(double scale) const {
        LinExpr e;
        e.constant = constant * scale;
        e.terms.reserve(terms.size());
        for (const auto& t : terms) e.terms.push_back({t.var, t.coeff * scale});
        return e;
    }

    double value(const Vec& z) const {
        double v = constant;
        for (const auto& t : terms) v += t.coeff * z(t.var);
        return v;
    }
};

enum class ConeKind { nonnegative, second_order, rotated_second_order, psd };

const char* cone_kind_name(ConeKind kind);

// Membership of a tuple of affine expressions in a cone:
//   nonnegative:          every expr >= 0
//   second_order:         (t, w...): t >= ||w||_2
//   rotated_second_order: (u, v, w...): 2uv >= ||w||^2, u >= 0, v >= 0
//   psd:                  exprs are the lower triangle (column-wise) of a
//                         symmetric matrix that must be PSD
struct ConeMembership {
    ConeKind kind;
    std::vector<LinExpr> exprs;

    // Matrix dimension for psd memberships (exprs.size() == d(d+1)/2).
    int psd_dim() const;
};

struct ProgramResiduals {
    double equality = 0.0;
    double cone = 0.0;
};

// Canonical convex subproblem: linear objective, linear equalities, cone
// memberships. All relaxation builders target this form.
struct ConicProgram {
    int num_vars = 0;
    std::vector<LinTerm> objective;  // sparse linear functional
    double objective_constant = 0.0;
    std::vector<LinExpr> equalities;  // each expr(z) == 0
    std::vector<ConeMembership> cones;

    int add_var() { return num_vars++; }
    int add_vars(int k) {
        const int first = num_vars;
        num_vars += k;
        return first;
    }

    void add_objective_term(int var, double coeff) {
        if (coeff != 0.0) objective.push_back({var, coeff});
    }
    void add_equality(LinExpr e) { equalities.push_back(std::move(e)); }
    void add_nonnegative(LinExpr e) {
        cones.push_back({ConeKind::nonnegative, {std::move(e)}});
    }
    void add_cone(ConeMembership m) { cones.push_back(std::move(m)); }

    double objective_value(const Vec& z) const {
        double v = objective_constant;
        for (const auto& t : objective) v += t.coeff * z(t.var);
        return v;
    }

    // Checks variable indices and cone arities; throws std::invalid_argument.
    void validate() const;

    // Max-norm violation of equalities and cone memberships at a point,
    // independent of any solver.
    ProgramResiduals residuals(const Vec& z) const;

    // One record per line, stable ordering; meant for diffing programs.
    std::string debug_dump() const;
};

// Violation of a single membership at a point (0 when satisfied). SOC-family
// violations are measured on the linear scale of the cone boundary; psd
// violation is the most negative eigenvalue, clamped to 0.
double cone_violation(const ConeMembership& m, const Vec& z);

// s >= |expr| via two nonnegative rows; returns the index of s.
int add_abs_epigraph(ConicProgram& prog, const LinExpr& expr);

// t >= ||exprs||_2 via one second-order membership; returns the index of t.
int add_norm2_epigraph(ConicProgram& prog, const std::vector<LinExpr>& exprs);

// ||vec||^2 <= lin as the rotated-cone membership (lin/2, 1, vec...). This is
// the single primitive realizing every parabolic constraint.
void add_quadratic_upper_bound(ConicProgram& prog, const LinExpr& lin,
                               const std::vector<LinExpr>& vec);

}  // namespace mrmp::conic
