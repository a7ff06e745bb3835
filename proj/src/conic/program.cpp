#include "mrmp/conic/program.hpp"

#include <algorithm>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace mrmp::conic {

const char* cone_kind_name(ConeKind kind) {
    switch (kind) {
        case ConeKind::nonnegative:
            return "nonnegative";
        case ConeKind::second_order:
            return "second_order";
        case ConeKind::rotated_second_order:
            return "rotated_second_order";
        case ConeKind::psd:
            return "psd";
    }
    return "?";
}

int ConeMembership::psd_dim() const {
    const int count = static_cast<int>(exprs.size());
    int d = static_cast<int>(std::round((std::sqrt(8.0 * count + 1.0) - 1.0) / 2.0));
    if (d * (d + 1) / 2 != count)
        throw std::invalid_argument("psd membership must carry d(d+1)/2 expressions");
    return d;
}

void ConicProgram::validate() const {
    auto check_expr = [&](const LinExpr& e) {
        for (const auto& t : e.terms)
            if (t.var < 0 || t.var >= num_vars)
                throw std::invalid_argument("expression references undeclared variable");
    };
    for (const auto& t : objective)
        if (t.var < 0 || t.var >= num_vars)
            throw std::invalid_argument("objective references undeclared variable");
    for (const auto& e : equalities) check_expr(e);
    for (const auto& m : cones) {
        for (const auto& e : m.exprs) check_expr(e);
        switch (m.kind) {
            case ConeKind::nonnegative:
                if (m.exprs.empty()) throw std::invalid_argument("empty nonnegative membership");
                break;
            case ConeKind::second_order:
                if (m.exprs.size() < 2)
                    throw std::invalid_argument("second_order membership needs >= 2 expressions");
                break;
            case ConeKind::rotated_second_order:
                if (m.exprs.size() < 3)
                    throw std::invalid_argument("rotated_second_order membership needs >= 3 expressions");
                break;
            case ConeKind::psd:
                (void)m.psd_dim();
                break;
        }
    }
}

double cone_violation(const ConeMembership& m, const Vec& z) {
    switch (m.kind) {
        case ConeKind::nonnegative: {
            double worst = 0.0;
            for (const auto& e : m.exprs) worst = std::max(worst, -e.value(z));
            return worst;
        }
        case ConeKind::second_order: {
            double tail2 = 0.0;
            for (size_t k = 1; k < m.exprs.size(); ++k) {
                const double v = m.exprs[k].value(z);
                tail2 += v * v;
            }
            return std::max(0.0, std::sqrt(tail2) - m.exprs[0].value(z));
        }
        case ConeKind::rotated_second_order: {
            // Margin of the equivalent second-order cone (u+v, u-v, sqrt2 w).
            const double u = m.exprs[0].value(z);
            const double v = m.exprs[1].value(z);
            double tail2 = (u - v) * (u - v);
            for (size_t k = 2; k < m.exprs.size(); ++k) {
                const double w = m.exprs[k].value(z);
                tail2 += 2.0 * w * w;
            }
            return std::max(0.0, std::sqrt(tail2) - (u + v));
        }
        case ConeKind::psd: {
            const int d = m.psd_dim();
            Mat M(d, d);
            int idx = 0;
            for (int c = 0; c < d; ++c)
                for (int r = c; r < d; ++r) {
                    const double v = m.exprs[idx++].value(z);
                    M(r, c) = v;
                    M(c, r) = v;
                }
            Eigen::SelfAdjointEigenSolver<Mat> eig(M, Eigen::EigenvaluesOnly);
            return std::max(0.0, -eig.eigenvalues().minCoeff());
        }
    }
    return 0.0;
}

ProgramResiduals ConicProgram::residuals(const Vec& z) const {
    if (z.size() != num_vars) throw std::invalid_argument("residuals: point has wrong dimension");
    ProgramResiduals r;
    for (const auto& e : equalities) r.equality = std::max(r.equality, std::abs(e.value(z)));
    for (const auto& m : cones) r.cone = std::max(r.cone, cone_violation(m, z));
    return r;
}

namespace {

void dump_expr(std::ostream& os, const LinExpr& e) {
    for (const auto& t : e.terms) os << " " << t.coeff << "*z" << t.var;
    os << " + " << e.constant;
}

}  // namespace

std::string ConicProgram::debug_dump() const {
    std::ostringstream os;
    os.precision(17);
    os << "vars " << num_vars << "\n";
    os << "objective_constant " << objective_constant << "\n";
    for (const auto& t : objective) os << "obj z" << t.var << " " << t.coeff << "\n";
    for (size_t i = 0; i < equalities.size(); ++i) {
        os << "eq " << i;
        dump_expr(os, equalities[i]);
        os << " == 0\n";
    }
    for (size_t i = 0; i < cones.size(); ++i) {
        os << "cone " << i << " " << cone_kind_name(cones[i].kind) << "\n";
        for (const auto& e : cones[i].exprs) {
            os << "  expr";
            dump_expr(os, e);
            os << "\n";
        }
    }
    return os.str();
}

int add_abs_epigraph(ConicProgram& prog, const LinExpr& expr) {
    const int s = prog.add_var();
    LinExpr upper = LinExpr::variable(s);  // s - expr >= 0
    upper.add(expr, -1.0);
    LinExpr lower = LinExpr::variable(s);  // s + expr >= 0
    lower.add(expr, 1.0);
    prog.add_nonnegative(std::move(upper));
    prog.add_nonnegative(std::move(lower));
    return s;
}

int add_norm2_epigraph(ConicProgram& prog, const std::vector<LinExpr>& exprs) {
    if (exprs.empty()) throw std::invalid_argument("add_norm2_epigraph: empty expression list");
    const int t = prog.add_var();
    ConeMembership m{ConeKind::second_order, {}};
    m.exprs.reserve(exprs.size() + 1);
    m.exprs.push_back(LinExpr::variable(t));
    for (const auto& e : exprs) m.exprs.push_back(e);
    prog.add_cone(std::move(m));
    return t;
}

void add_quadratic_upper_bound(ConicProgram& prog, const LinExpr& lin,
                               const std::vector<LinExpr>& vec) {
    ConeMembership m{ConeKind::rotated_second_order, {}};
    m.exprs.reserve(vec.size() + 2);
    m.exprs.push_back(lin.scaled(0.5));  // 2 * (lin/2) * 1 >= ||vec||^2
    m.exprs.push_back(LinExpr(1.0));
    for (const auto& e : vec) m.exprs.push_back(e);
    prog.add_cone(std::move(m));
}

}  // namespace mrmp::conic
