#include "mrmp/conic/ipm.hpp"

#include <algorithm>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <vector>

#include "mrmp/kernels/spmv.hpp"

namespace mrmp::conic {

const char* solve_status_name(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal:
            return "optimal";
        case SolveStatus::infeasible:
            return "infeasible";
        case SolveStatus::unbounded:
            return "unbounded";
        case SolveStatus::numerical_failure:
            return "numerical_failure";
        case SolveStatus::iteration_limit:
            return "iteration_limit";
    }
    return "?";
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// min c'x  s.t.  A x = b,  G x + s = h,  s in K.
// K is ordered: nonnegative orthant (l rows), second-order cones, PSD cones
// in svec coordinates (off-diagonal entries scaled by sqrt(2)).
struct StandardForm {
    int n = 0;
    Vec c;
    double c0 = 0.0;
    Eigen::SparseMatrix<double> A;
    Vec b;
    Eigen::SparseMatrix<double> G;
    Vec h;
    int l = 0;
    std::vector<int> soc_dims;
    std::vector<int> psd_dims;  // matrix dims

    int p() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(G.rows()); }
};

StandardForm to_standard_form(const ConicProgram& prog) {
    StandardForm sf;
    sf.n = prog.num_vars;
    sf.c = Vec::Zero(sf.n);
    for (const auto& t : prog.objective) sf.c(t.var) += t.coeff;
    sf.c0 = prog.objective_constant;

    std::vector<Eigen::Triplet<double>> ta;
    Vec b(prog.equalities.size());
    for (size_t i = 0; i < prog.equalities.size(); ++i) {
        for (const auto& t : prog.equalities[i].terms)
            ta.emplace_back(static_cast<int>(i), t.var, t.coeff);
        b(static_cast<Eigen::Index>(i)) = -prog.equalities[i].constant;
    }
    sf.A.resize(static_cast<int>(prog.equalities.size()), sf.n);
    sf.A.setFromTriplets(ta.begin(), ta.end());
    sf.b = std::move(b);

    std::vector<Eigen::Triplet<double>> tg;
    std::vector<double> h;
    int row = 0;
    auto push_row = [&](const LinExpr& e, double scale) {
        for (const auto& t : e.terms) tg.emplace_back(row, t.var, -scale * t.coeff);
        h.push_back(scale * e.constant);
        ++row;
    };

    // Nonnegative rows first.
    for (const auto& cone : prog.cones) {
        if (cone.kind != ConeKind::nonnegative) continue;
        for (const auto& e : cone.exprs) push_row(e, 1.0);
    }
    sf.l = row;
    // A zero-row slack keeps degenerate cone-free programs on the same path.
    if (sf.l == 0 && prog.cones.empty()) {
        tg.emplace_back(row, 0, 0.0);
        h.push_back(1.0);
        ++row;
        sf.l = 1;
    }

    // Second-order cones; rotated memberships are rewritten via
    // (u, v, w) in Qr  <=>  (u + v, u - v, sqrt(2) w) in Q.
    for (const auto& cone : prog.cones) {
        if (cone.kind == ConeKind::second_order) {
            for (const auto& e : cone.exprs) push_row(e, 1.0);
            sf.soc_dims.push_back(static_cast<int>(cone.exprs.size()));
        } else if (cone.kind == ConeKind::rotated_second_order) {
            LinExpr sum = cone.exprs[0];
            sum.add(cone.exprs[1], 1.0);
            LinExpr diff = cone.exprs[0];
            diff.add(cone.exprs[1], -1.0);
            push_row(sum, 1.0);
            push_row(diff, 1.0);
            for (size_t k = 2; k < cone.exprs.size(); ++k) push_row(cone.exprs[k], kSqrt2);
            sf.soc_dims.push_back(static_cast<int>(cone.exprs.size()));
        }
    }

    // PSD blocks in svec coordinates, lower triangle column-wise.
    for (const auto& cone : prog.cones) {
        if (cone.kind != ConeKind::psd) continue;
        const int d = cone.psd_dim();
        int idx = 0;
        for (int c = 0; c < d; ++c)
            for (int r = c; r < d; ++r) push_row(cone.exprs[idx++], r == c ? 1.0 : kSqrt2);
        sf.psd_dims.push_back(d);
    }

    sf.G.resize(row, sf.n);
    sf.G.setFromTriplets(tg.begin(), tg.end());
    sf.h = Eigen::Map<Vec>(h.data(), static_cast<Eigen::Index>(h.size()));
    return sf;
}

// svec <-> symmetric matrix, lower triangle column-wise, off-diagonals
// carrying a sqrt(2) factor so inner products are preserved.
void svec_to_mat(const double* v, Mat& M) {
    const int d = static_cast<int>(M.rows());
    int idx = 0;
    for (int c = 0; c < d; ++c)
        for (int r = c; r < d; ++r) {
            const double x = (r == c) ? v[idx] : v[idx] / kSqrt2;
            M(r, c) = x;
            M(c, r) = x;
            ++idx;
        }
}

void mat_to_svec(const Mat& M, double* v) {
    const int d = static_cast<int>(M.rows());
    int idx = 0;
    for (int c = 0; c < d; ++c)
        for (int r = c; r < d; ++r) v[idx++] = (r == c) ? M(r, c) : kSqrt2 * 0.5 * (M(r, c) + M(c, r));
}

struct SocScaling {
    double eta = 1.0;
    Vec wbar;  // NT point, wbar0^2 - ||wbar_tail||^2 = 1
};

struct PsdScaling {
    int d = 0;
    Mat R, Rinv;
    Vec sigma;          // scaled eigenvalues; lambda block = svec(diag(sigma))
    Mat work_a, work_b;  // scratch
};

// All cone-local state for the NT-scaled iteration.
struct ConeState {
    int l = 0;
    std::vector<int> soc_dims, soc_offsets;
    std::vector<int> psd_dims, psd_offsets, psd_svec_dims;
    int m = 0;
    double barrier_degree = 0.0;

    Vec lp_w2;  // s_i / z_i for the orthant block
    std::vector<SocScaling> soc;
    std::vector<PsdScaling> psd;

    void init(const StandardForm& sf) {
        l = sf.l;
        soc_dims = sf.soc_dims;
        psd_dims = sf.psd_dims;
        int off = l;
        for (int d : soc_dims) {
            soc_offsets.push_back(off);
            off += d;
        }
        for (int d : psd_dims) {
            psd_offsets.push_back(off);
            psd_svec_dims.push_back(d * (d + 1) / 2);
            off += d * (d + 1) / 2;
        }
        m = off;
        barrier_degree = l + static_cast<double>(soc_dims.size());
        for (int d : psd_dims) barrier_degree += d;
        lp_w2 = Vec::Ones(l);
        soc.resize(soc_dims.size());
        for (size_t k = 0; k < soc_dims.size(); ++k) {
            soc[k].wbar = Vec::Zero(soc_dims[k]);
            soc[k].wbar(0) = 1.0;
        }
        psd.resize(psd_dims.size());
        for (size_t k = 0; k < psd_dims.size(); ++k) {
            const int d = psd_dims[k];
            psd[k].d = d;
            psd[k].R = Mat::Identity(d, d);
            psd[k].Rinv = Mat::Identity(d, d);
            psd[k].sigma = Vec::Ones(d);
            psd[k].work_a.resize(d, d);
            psd[k].work_b.resize(d, d);
        }
    }

    // Identity element of the cone algebra.
    Vec identity() const {
        Vec e = Vec::Zero(m);
        e.head(l).setOnes();
        for (size_t k = 0; k < soc_dims.size(); ++k) e(soc_offsets[k]) = 1.0;
        for (size_t k = 0; k < psd_dims.size(); ++k) {
            int idx = psd_offsets[k];
            const int d = psd_dims[k];
            for (int c = 0; c < d; ++c) {
                e(idx) = 1.0;
                idx += d - c;
            }
        }
        return e;
    }

    // Worst boundary deficit of a point: negative when strictly interior,
    // otherwise the shift needed to reach the boundary. Used to move initial
    // points into the cone.
    double interior_deficit(const Vec& r) const {
        double alpha = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < l; ++i) alpha = std::max(alpha, -r(i));
        for (size_t k = 0; k < soc_dims.size(); ++k) {
            const int o = soc_offsets[k], d = soc_dims[k];
            alpha = std::max(alpha, r.segment(o + 1, d - 1).norm() - r(o));
        }
        for (size_t k = 0; k < psd_dims.size(); ++k) {
            Mat M(psd_dims[k], psd_dims[k]);
            svec_to_mat(r.data() + psd_offsets[k], M);
            Eigen::SelfAdjointEigenSolver<Mat> eig(M, Eigen::EigenvaluesOnly);
            alpha = std::max(alpha, -eig.eigenvalues().minCoeff());
        }
        return alpha;
    }

    bool update_scalings(const Vec& s, const Vec& z, Vec& lambda) {
        for (int i = 0; i < l; ++i) {
            if (s(i) <= 0.0 || z(i) <= 0.0) return false;
            lp_w2(i) = s(i) / z(i);
            lambda(i) = std::sqrt(s(i) * z(i));
        }
        for (size_t k = 0; k < soc_dims.size(); ++k) {
            const int o = soc_offsets[k], d = soc_dims[k];
            const double sres = s(o) * s(o) - s.segment(o + 1, d - 1).squaredNorm();
            const double zres = z(o) * z(o) - z.segment(o + 1, d - 1).squaredNorm();
            if (sres <= 0.0 || zres <= 0.0 || s(o) <= 0.0 || z(o) <= 0.0) return false;
            const double snorm = std::sqrt(sres), znorm = std::sqrt(zres);
            Vec sbar = s.segment(o, d) / snorm;
            Vec zbar = z.segment(o, d) / znorm;
            const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
            SocScaling& sc = soc[k];
            sc.eta = std::sqrt(snorm / znorm);
            sc.wbar.resize(d);
            sc.wbar(0) = (0.5 / gamma) * (sbar(0) + zbar(0));
            sc.wbar.tail(d - 1) = (0.5 / gamma) * (sbar.tail(d - 1) - zbar.tail(d - 1));
        }
        for (size_t k = 0; k < psd_dims.size(); ++k) {
            PsdScaling& ps = psd[k];
            const int o = psd_offsets[k];
            Mat S(ps.d, ps.d), Z(ps.d, ps.d);
            svec_to_mat(s.data() + o, S);
            svec_to_mat(z.data() + o, Z);
            Eigen::LLT<Mat> ls(S), lz(Z);
            if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
            const Mat Ls = ls.matrixL();
            const Mat Lz = lz.matrixL();
            Eigen::JacobiSVD<Mat> svd(Lz.transpose() * Ls,
                                      Eigen::ComputeFullU | Eigen::ComputeFullV);
            ps.sigma = svd.singularValues();
            if (ps.sigma.minCoeff() <= 0.0) return false;
            const Vec si = ps.sigma.cwiseSqrt().cwiseInverse();
            ps.R = Ls * svd.matrixV() * si.asDiagonal();
            ps.Rinv = si.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
        }
        // lambda = W z everywhere (for PSD this is diag(sigma) by
        // construction, but computing it uniformly keeps the code honest).
        apply_W(z, lambda);
        return true;
    }

    // lambda-blockwise operators. W is symmetric for the orthant and
    // second-order blocks; for PSD blocks W v = svec(R' mat(v) R) and its
    // adjoint uses the transposed congruence.
    void apply_W(const Vec& v, Vec& out) const {
        out.head(l) = lp_w2.head(l).cwiseSqrt().cwiseProduct(v.head(l));
        for (size_t k = 0; k < soc_dims.size(); ++k) soc_apply(k, v, out, false);
        for (size_t k = 0; k < psd_dims.size(); ++k) psd_congruence(k, v, out, /*transpose=*/true);
    }
    void apply_WT(const Vec& v, Vec& out) const {
        out.head(l) = lp_w2.head(l).cwiseSqrt().cwiseProduct(v.head(l));
        for (size_t k = 0; k < soc_dims.size(); ++k) soc_apply(k, v, out, false);
        for (size_t k = 0; k < psd_dims.size(); ++k) psd_congruence(k, v, out, /*transpose=*/false);
    }
    void apply_WinvT(const Vec& v, Vec& out) const {
        out.head(l) = v.head(l).cwiseQuotient(lp_w2.head(l).cwiseSqrt());
        for (size_t k = 0; k < soc_dims.size(); ++k) soc_apply(k, v, out, true);
        for (size_t k = 0; k < psd_dims.size(); ++k) psd_congruence_inv(k, v, out);
    }

    void soc_apply(size_t k, const Vec& v, Vec& out, bool inverse) const {
        const int o = soc_offsets[k], d = soc_dims[k];
        const SocScaling& sc = soc[k];
        const double w0 = sc.wbar(0);
        // P(wbar)^{-1} = P(J wbar); the eta factor inverts separately.
        const double sgn = inverse ? -1.0 : 1.0;
        const double eta = inverse ? 1.0 / sc.eta : sc.eta;
        const double zeta = sgn * sc.wbar.tail(d - 1).dot(v.segment(o + 1, d - 1));
        out(o) = eta * (w0 * v(o) + zeta);
        const double factor = v(o) + zeta / (1.0 + w0);
        out.segment(o + 1, d - 1) =
            eta * (v.segment(o + 1, d - 1) + sgn * factor * sc.wbar.tail(d - 1));
    }

    void psd_congruence(size_t k, const Vec& v, Vec& out, bool transpose) const {
        const PsdScaling& ps = psd[k];
        const int o = psd_offsets[k];
        Mat& M = const_cast<Mat&>(ps.work_a);
        Mat& T = const_cast<Mat&>(ps.work_b);
        svec_to_mat(v.data() + o, M);
        if (transpose)
            T = ps.R.transpose() * M * ps.R;  // W
        else
            T = ps.R * M * ps.R.transpose();  // W'
        mat_to_svec(T, out.data() + o);
    }

    void psd_congruence_inv(size_t k, const Vec& v, Vec& out) const {
        const PsdScaling& ps = psd[k];
        const int o = psd_offsets[k];
        Mat& M = const_cast<Mat&>(ps.work_a);
        Mat& T = const_cast<Mat&>(ps.work_b);
        svec_to_mat(v.data() + o, M);
        T = ps.Rinv * M * ps.Rinv.transpose();  // W^{-T}
        mat_to_svec(T, out.data() + o);
    }

    // Jordan product u o v.
    void product(const Vec& u, const Vec& v, Vec& out) const {
        out.head(l) = u.head(l).cwiseProduct(v.head(l));
        for (size_t k = 0; k < soc_dims.size(); ++k) {
            const int o = soc_offsets[k], d = soc_dims[k];
            out(o) = u.segment(o, d).dot(v.segment(o, d));
            out.segment(o + 1, d - 1) =
                u(o) * v.segment(o + 1, d - 1) + v(o) * u.segment(o + 1, d - 1);
        }
        for (size_t k = 0; k < psd_dims.size(); ++k) {
            const PsdScaling& ps = psd[k];
            const int o = psd_offsets[k];
            Mat U(ps.d, ps.d), V(ps.d, ps.d);
            svec_to_mat(u.data() + o, U);
            svec_to_mat(v.data() + o, V);
            Mat P = 0.5 * (U * V + V * U);
            mat_to_svec(P, out.data() + o);
        }
    }

    // out = lambda \ v, i.e. solve L(lambda) out = v where lambda is the
    // current scaled point.
    void lambda_solve(const Vec& lambda, const Vec& v, Vec& out) const {
        out.head(l) = v.head(l).cwiseQuotient(lambda.head(l));
        for (size_t k = 0; k < soc_dims.size(); ++k) {
            const int o = soc_offsets[k], d = soc_dims[k];
            const double l0 = lambda(o);
            const auto lt = lambda.segment(o + 1, d - 1);
            const double rho = l0 * l0 - lt.squaredNorm();
            const double zeta = lt.dot(v.segment(o + 1, d - 1));
            out(o) = (l0 * v(o) - zeta) / rho;
            const double factor = (zeta / l0 - v(o)) / rho;
            out.segment(o + 1, d - 1) = factor * lt + v.segment(o + 1, d - 1) / l0;
        }
        for (size_t k = 0; k < psd_dims.size(); ++k) {
            // lambda block is diag(sigma): solution is 2 v_ij / (sig_i+sig_j).
            const PsdScaling& ps = psd[k];
            const int o = psd_offsets[k];
            Mat V(ps.d, ps.d);
            svec_to_mat(v.data() + o, V);
            Mat O(ps.d, ps.d);
            for (int c = 0; c < ps.d; ++c)
                for (int r = 0; r < ps.d; ++r) O(r, c) = 2.0 * V(r, c) / (ps.sigma(r) + ps.sigma(c));
            mat_to_svec(O, out.data() + o);
        }
    }

    // Largest step a with lambda + a*d staying in the cone (per block),
    // capped by the caller.
    double max_step(const Vec& lambda, const Vec& d, double cap) const {
        double alpha = cap;
        for (int i = 0; i < l; ++i) {
            if (d(i) < 0.0) alpha = std::min(alpha, -lambda(i) / d(i));
        }
        for (size_t k = 0; k < soc_dims.size(); ++k) {
            const int o = soc_offsets[k], dim = soc_dims[k];
            // First positive root of ||(lam+t d)_tail||^2 - (lam0+t d0)^2 = 0.
            const double a = d.segment(o + 1, dim - 1).squaredNorm() - d(o) * d(o);
            const double b =
                2.0 * (lambda.segment(o + 1, dim - 1).dot(d.segment(o + 1, dim - 1)) -
                       lambda(o) * d(o));
            const double c =
                lambda.segment(o + 1, dim - 1).squaredNorm() - lambda(o) * lambda(o);
            // c < 0 in the interior. Roots of a t^2 + b t + c.
            double root = std::numeric_limits<double>::infinity();
            if (std::abs(a) < 1e-14) {
                if (b > 0.0) root = -c / b;
            } else {
                const double disc = b * b - 4.0 * a * c;
                if (disc >= 0.0) {
                    const double sq = std::sqrt(disc);
                    const double r1 = (-b - sq) / (2.0 * a);
                    const double r2 = (-b + sq) / (2.0 * a);
                    root = std::numeric_limits<double>::infinity();
                    if (r1 > 0.0) root = std::min(root, r1);
                    if (r2 > 0.0) root = std::min(root, r2);
                } else if (a < 0.0) {
                    root = std::numeric_limits<double>::infinity();
                }
            }
            if (root < alpha) alpha = root;
        }
        for (size_t k = 0; k < psd_dims.size(); ++k) {
            const PsdScaling& ps = psd[k];
            const int o = psd_offsets[k];
            Mat D(ps.d, ps.d);
            svec_to_mat(d.data() + o, D);
            const Vec si = ps.sigma.cwiseSqrt().cwiseInverse();
            Mat Dn = si.asDiagonal() * D * si.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Mat> eig(Dn, Eigen::EigenvaluesOnly);
            const double lmin = eig.eigenvalues().minCoeff();
            if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
        }
        return alpha;
    }
};

struct KktSystem {
    int n = 0, p = 0, m = 0;
    Eigen::SparseMatrix<double> K;  // lower triangle
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
    bool analyzed = false;
    double delta = 1e-8;

    // Value slots for the scaling-dependent entries, one list per cone block.
    struct Slot {
        double* value;
        int i, j;  // block-local indices
    };
    std::vector<double*> lp_diag;                 // orthant rows
    std::vector<std::vector<Slot>> soc_slots;     // dense lower blocks
    std::vector<std::vector<Slot>> psd_slots;
    std::vector<double*> diag_x, diag_y, diag_z;  // regularization slots

    kernels::CsrMatrix A_csr, At_csr, G_csr, Gt_csr;

    void setup(const StandardForm& sf, const ConeState& cone) {
        n = sf.n;
        p = sf.p();
        m = sf.m();
        const int dim = n + p + m;
        std::vector<Eigen::Triplet<double>> trip;
        for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
        for (int col = 0; col < sf.A.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(sf.A, col); it; ++it)
                trip.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                  it.value());
        for (int i = 0; i < p; ++i) trip.emplace_back(n + i, n + i, -1.0);
        for (int col = 0; col < sf.G.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(sf.G, col); it; ++it)
                trip.emplace_back(n + p + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                  it.value());
        for (int i = 0; i < cone.l; ++i) trip.emplace_back(n + p + i, n + p + i, -1.0);
        for (size_t k = 0; k < cone.soc_dims.size(); ++k) {
            const int o = n + p + cone.soc_offsets[k];
            for (int j = 0; j < cone.soc_dims[k]; ++j)
                for (int i = j; i < cone.soc_dims[k]; ++i)
                    trip.emplace_back(o + i, o + j, i == j ? -1.0 : 0.0);
        }
        for (size_t k = 0; k < cone.psd_dims.size(); ++k) {
            const int o = n + p + cone.psd_offsets[k];
            const int sd = cone.psd_svec_dims[k];
            for (int j = 0; j < sd; ++j)
                for (int i = j; i < sd; ++i) trip.emplace_back(o + i, o + j, i == j ? -1.0 : 0.0);
        }
        K.resize(dim, dim);
        K.setFromTriplets(trip.begin(), trip.end());
        K.makeCompressed();

        lp_diag.resize(cone.l);
        diag_x.resize(n);
        diag_y.resize(p);
        diag_z.resize(m);
        for (int i = 0; i < n; ++i) diag_x[i] = slot(i, i);
        for (int i = 0; i < p; ++i) diag_y[i] = slot(n + i, n + i);
        for (int i = 0; i < cone.l; ++i) {
            lp_diag[i] = slot(n + p + i, n + p + i);
            diag_z[i] = lp_diag[i];
        }
        soc_slots.resize(cone.soc_dims.size());
        for (size_t k = 0; k < cone.soc_dims.size(); ++k) {
            const int o = n + p + cone.soc_offsets[k];
            for (int j = 0; j < cone.soc_dims[k]; ++j)
                for (int i = j; i < cone.soc_dims[k]; ++i) {
                    soc_slots[k].push_back({slot(o + i, o + j), i, j});
                    if (i == j) diag_z[cone.soc_offsets[k] + i] = soc_slots[k].back().value;
                }
        }
        psd_slots.resize(cone.psd_dims.size());
        for (size_t k = 0; k < cone.psd_dims.size(); ++k) {
            const int o = n + p + cone.psd_offsets[k];
            const int sd = cone.psd_svec_dims[k];
            for (int j = 0; j < sd; ++j)
                for (int i = j; i < sd; ++i) {
                    psd_slots[k].push_back({slot(o + i, o + j), i, j});
                    if (i == j) diag_z[cone.psd_offsets[k] + i] = psd_slots[k].back().value;
                }
        }

        A_csr = kernels::CsrMatrix::from_sparse(sf.A);
        At_csr = kernels::CsrMatrix::from_sparse(sf.A.transpose());
        G_csr = kernels::CsrMatrix::from_sparse(sf.G);
        Gt_csr = kernels::CsrMatrix::from_sparse(sf.G.transpose());
    }

    double* slot(int r, int c) {
        for (int k = K.outerIndexPtr()[c]; k < K.outerIndexPtr()[c + 1]; ++k)
            if (K.innerIndexPtr()[k] == r) return &K.valuePtr()[k];
        throw std::logic_error("kkt slot not found");
    }

    // Writes -W'W into the cone block and refreshes the regularization.
    void update_scaling_values(const ConeState& cone, std::vector<Mat>& soc_w2,
                               std::vector<Mat>& psd_w2) {
        for (int i = 0; i < cone.l; ++i) *lp_diag[i] = -cone.lp_w2(i) - delta;
        for (size_t k = 0; k < cone.soc_dims.size(); ++k) {
            const Mat& W2 = soc_w2[k];
            for (const auto& s : soc_slots[k])
                *s.value = -W2(s.i, s.j) - (s.i == s.j ? delta : 0.0);
        }
        for (size_t k = 0; k < cone.psd_dims.size(); ++k) {
            const Mat& W2 = psd_w2[k];
            for (const auto& s : psd_slots[k])
                *s.value = -W2(s.i, s.j) - (s.i == s.j ? delta : 0.0);
        }
        for (double* v : diag_x) *v = delta;
        for (double* v : diag_y) *v = -delta;
    }

    bool factorize() {
        if (!analyzed) {
            ldlt.analyzePattern(K);
            analyzed = true;
        }
        ldlt.factorize(K);
        return ldlt.info() == Eigen::Success;
    }
};

struct Workspace {
    Vec x, y, z, s, lambda;
    double tau = 1.0, kap = 1.0;
};

enum class ExitReason { none, optimal, close_to_optimal, pinf, dinf, maxit, numerics };

struct Stats {
    double gap = 0, mu = 0, pcost = 0, dcost = 0, pres = 0, dres = 0;
    double relgap = std::numeric_limits<double>::quiet_NaN();
    double pinfres = std::numeric_limits<double>::quiet_NaN();
    double dinfres = std::numeric_limits<double>::quiet_NaN();
    double cx = 0, by = 0, hz = 0;
};

class IpmCore {
public:
    IpmCore(const StandardForm& sf, const IpmSettings& settings) : sf_(sf), st_(settings) {
        cone_.init(sf);
        kkt_.delta = settings.static_reg;
        kkt_.setup(sf, cone_);
        const int m = cone_.m;
        w_.x = Vec::Zero(sf.n);
        w_.y = Vec::Zero(sf.p());
        w_.z = Vec::Zero(m);
        w_.s = Vec::Zero(m);
        w_.lambda = Vec::Zero(m);
        e_ = cone_.identity();
        soc_w2_.resize(cone_.soc_dims.size());
        psd_w2_.resize(cone_.psd_dims.size());
        resx0_ = std::max(1.0, sf.c.norm());
        resy0_ = std::max(1.0, sf.b.norm());
        resz0_ = std::max(1.0, sf.h.norm());
    }

    BackendResult run();

private:
    void build_w2_blocks() {
        for (size_t k = 0; k < cone_.soc_dims.size(); ++k) {
            const int d = cone_.soc_dims[k];
            const SocScaling& sc = cone_.soc[k];
            Mat& W2 = soc_w2_[k];
            W2.resize(d, d);
            const double e2 = sc.eta * sc.eta;
            // P(wbar)^2 = 2 wbar wbar' - J with J = diag(1, -I).
            for (int i = 0; i < d; ++i)
                for (int j = 0; j <= i; ++j) {
                    double v = 2.0 * sc.wbar(i) * sc.wbar(j);
                    if (i == j) v += (i == 0) ? -1.0 : 1.0;
                    W2(i, j) = e2 * v;
                    W2(j, i) = W2(i, j);
                }
        }
        for (size_t k = 0; k < cone_.psd_dims.size(); ++k) {
            const PsdScaling& ps = cone_.psd[k];
            const int d = ps.d, sd = cone_.psd_svec_dims[k];
            const Mat T = ps.R * ps.R.transpose();
            Mat& W2 = psd_w2_[k];
            W2.resize(sd, sd);
            // Column for svec basis (r,c) is svec of scale*(t_r t_c' + t_c t_r').
            int col = 0;
            Mat M(d, d);
            for (int c = 0; c < d; ++c)
                for (int r = c; r < d; ++r) {
                    const double scl = (r == c) ? 0.5 : 0.5 * kSqrt2;
                    M.noalias() = scl * (T.col(r) * T.col(c).transpose());
                    M.noalias() += scl * (T.col(c) * T.col(r).transpose());
                    mat_to_svec(M, W2.col(col).data());
                    ++col;
                }
        }
    }

    // Unregularized K times v, via the structured parts.
    void kkt_multiply(const Vec& v, Vec& out) const {
        const int n = sf_.n, p = sf_.p(), m = cone_.m;
        out.resize(n + p + m);
        kkt_.At_csr.mul_omp(v.data() + n, out.data());
        tmp_n_.resize(n);
        kkt_.Gt_csr.mul_omp(v.data() + n + p, tmp_n_.data());
        out.head(n) += tmp_n_;
        if (p > 0) kkt_.A_csr.mul_omp(v.data(), out.data() + n);
        kkt_.G_csr.mul_omp(v.data(), out.data() + n + p);
        // minus W'W on the cone block
        auto zseg = v.segment(n + p, m);
        tmp_m_.resize(m);
        tmp_m_.head(cone_.l) = cone_.lp_w2.cwiseProduct(zseg.head(cone_.l));
        for (size_t k = 0; k < cone_.soc_dims.size(); ++k)
            tmp_m_.segment(cone_.soc_offsets[k], cone_.soc_dims[k]).noalias() =
                soc_w2_[k] * zseg.segment(cone_.soc_offsets[k], cone_.soc_dims[k]);
        for (size_t k = 0; k < cone_.psd_dims.size(); ++k)
            tmp_m_.segment(cone_.psd_offsets[k], cone_.psd_svec_dims[k]).noalias() =
                psd_w2_[k] * zseg.segment(cone_.psd_offsets[k], cone_.psd_svec_dims[k]);
        out.segment(n + p, m) -= tmp_m_;
    }

    // LDLT solve with iterative refinement against the unregularized system.
    void kkt_solve(const Vec& rhs, Vec& dx, Vec& dy, Vec& dz) {
        Vec sol = kkt_.ldlt.solve(rhs);
        Vec res(rhs.size()), corr;
        for (int it = 0; it < st_.refine_iters; ++it) {
            kkt_multiply(sol, res);
            res = rhs - res;
            const double rn = res.lpNorm<Eigen::Infinity>();
            if (rn <= 1e-12 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) break;
            corr = kkt_.ldlt.solve(res);
            sol += corr;
        }
        const int n = sf_.n, p = sf_.p();
        dx = sol.head(n);
        dy = sol.segment(n, p);
        dz = sol.tail(cone_.m);
    }

    const StandardForm& sf_;
    IpmSettings st_;
    ConeState cone_;
    KktSystem kkt_;
    Workspace w_, best_;
    Stats stats_, best_stats_;
    bool have_best_ = false;
    Vec e_;
    std::vector<Mat> soc_w2_, psd_w2_;
    double resx0_ = 1, resy0_ = 1, resz0_ = 1;
    mutable Vec tmp_n_, tmp_m_;

    Vec rx_, ry_, rz_;
    double rt_ = 0.0;
    double hresx_ = 0, hresy_ = 0, hresz_ = 0;

    void compute_residuals() {
        const int p = sf_.p();
        rx_ = -gt_mul(w_.z);
        if (p > 0) rx_ -= at_mul(w_.y);
        hresx_ = rx_.norm();
        rx_ -= w_.tau * sf_.c;

        if (p > 0) {
            ry_ = a_mul(w_.x);
            hresy_ = ry_.norm();
            ry_ -= w_.tau * sf_.b;
        } else {
            ry_.resize(0);
            hresy_ = 0.0;
        }

        rz_ = w_.s + g_mul(w_.x);
        hresz_ = rz_.norm();
        rz_ -= w_.tau * sf_.h;

        stats_.cx = sf_.c.dot(w_.x);
        stats_.by = p > 0 ? sf_.b.dot(w_.y) : 0.0;
        stats_.hz = sf_.h.dot(w_.z);
        rt_ = w_.kap + stats_.cx + stats_.by + stats_.hz;
    }

    void update_statistics() {
        stats_.gap = w_.s.dot(w_.z);
        stats_.mu = (stats_.gap + w_.kap * w_.tau) / (cone_.barrier_degree + 1.0);
        stats_.pcost = stats_.cx / w_.tau;
        stats_.dcost = -(stats_.hz + stats_.by) / w_.tau;
        if (stats_.pcost < 0.0)
            stats_.relgap = stats_.gap / (-stats_.pcost);
        else if (stats_.dcost > 0.0)
            stats_.relgap = stats_.gap / stats_.dcost;
        else
            stats_.relgap = std::numeric_limits<double>::quiet_NaN();

        const double nx = w_.x.norm(), ny = w_.y.norm(), nz = w_.z.norm(), ns = w_.s.norm();
        const double nry = sf_.p() > 0 ? ry_.norm() / std::max(resy0_ + nx, 1.0) : 0.0;
        const double nrz = rz_.norm() / std::max(resz0_ + nx + ns, 1.0);
        stats_.pres = std::max(nry, nrz) / w_.tau;
        stats_.dres = rx_.norm() / std::max(resx0_ + ny + nz, 1.0) / w_.tau;

        stats_.pinfres = std::numeric_limits<double>::quiet_NaN();
        stats_.dinfres = std::numeric_limits<double>::quiet_NaN();
        if ((stats_.hz + stats_.by) / std::max(ny + nz, 1.0) < -st_.reltol)
            stats_.pinfres = hresx_ / std::max(ny + nz, 1.0);
        if (stats_.cx / std::max(nx, 1.0) < -st_.reltol)
            stats_.dinfres =
                std::max(hresy_ / std::max(nx, 1.0), hresz_ / std::max(nx + ns, 1.0));
    }

    ExitReason check_exit(bool reduced) const {
        const double feastol = reduced ? st_.feastol_reduced : st_.feastol;
        const double abstol = reduced ? st_.abstol_reduced : st_.abstol;
        const double reltol = reduced ? st_.reltol_reduced : st_.reltol;
        const bool relgap_ok = !std::isnan(stats_.relgap) && stats_.relgap < reltol;
        if ((-stats_.cx > 0.0 || -stats_.by - stats_.hz >= -abstol) &&
            stats_.pres < feastol && stats_.dres < feastol &&
            (stats_.gap < abstol || relgap_ok)) {
            return reduced ? ExitReason::close_to_optimal : ExitReason::optimal;
        }
        if (!std::isnan(stats_.dinfres) && stats_.dinfres < feastol && w_.tau < w_.kap)
            return ExitReason::dinf;
        if (!std::isnan(stats_.pinfres) && stats_.pinfres < feastol &&
            (w_.tau < w_.kap || (w_.tau < feastol && w_.kap < feastol)))
            return ExitReason::pinf;
        return ExitReason::none;
    }

    bool better_than_best() const {
        if (!have_best_) return true;
        const double cur = std::max(stats_.pres, stats_.dres) + std::abs(stats_.gap) / resz0_;
        const double best = std::max(best_stats_.pres, best_stats_.dres) +
                            std::abs(best_stats_.gap) / resz0_;
        return std::isfinite(cur) && cur < best;
    }

    Vec a_mul(const Vec& v) const {
        Vec out(kkt_.A_csr.rows);
        kkt_.A_csr.mul_omp(v.data(), out.data());
        return out;
    }
    Vec at_mul(const Vec& v) const {
        Vec out(kkt_.At_csr.rows);
        kkt_.At_csr.mul_omp(v.data(), out.data());
        return out;
    }
    Vec g_mul(const Vec& v) const {
        Vec out(kkt_.G_csr.rows);
        kkt_.G_csr.mul_omp(v.data(), out.data());
        return out;
    }
    Vec gt_mul(const Vec& v) const {
        Vec out(kkt_.Gt_csr.rows);
        kkt_.Gt_csr.mul_omp(v.data(), out.data());
        return out;
    }

    BackendResult make_result(ExitReason reason, int iters) const {
        BackendResult result;
        result.iterations = iters;
        switch (reason) {
            case ExitReason::optimal:
            case ExitReason::close_to_optimal:
                result.status = SolveStatus::optimal;
                result.primal = w_.x / w_.tau;
                result.objective_value = sf_.c.dot(result.primal) + sf_.c0;
                break;
            case ExitReason::pinf:
                result.status = SolveStatus::infeasible;
                break;
            case ExitReason::dinf:
                result.status = SolveStatus::unbounded;
                break;
            case ExitReason::maxit:
                result.status = SolveStatus::iteration_limit;
                break;
            default:
                result.status = SolveStatus::numerical_failure;
                break;
        }
        return result;
    }
};

BackendResult IpmCore::run() {
    const int n = sf_.n, p = sf_.p(), m = cone_.m;
    const int dim = n + p + m;

    // Initial scalings are identity.
    build_w2_blocks();
    kkt_.update_scaling_values(cone_, soc_w2_, psd_w2_);
    {
        bool ok = kkt_.factorize();
        for (int tries = 0; !ok && tries < 3; ++tries) {
            kkt_.delta *= 100.0;
            kkt_.update_scaling_values(cone_, soc_w2_, psd_w2_);
            ok = kkt_.factorize();
        }
        if (!ok) return make_result(ExitReason::numerics, 0);
    }

    Vec rhs = Vec::Zero(dim);
    Vec dx1(n), dy1(p), dz1(m), dx2(n), dy2(p), dz2(m);

    // Primal start: argmin ||s||^2 over the equalities, shifted into the cone.
    rhs.segment(n, p) = sf_.b;
    rhs.tail(m) = sf_.h;
    kkt_solve(rhs, dx1, dy1, dz1);
    w_.x = dx1;
    {
        Vec r = -dz1;
        const double deficit = cone_.interior_deficit(r);
        w_.s = (deficit < 0.0) ? r : Vec(r + (1.0 + deficit) * e_);
    }

    // Dual start.
    rhs.setZero();
    rhs.head(n) = -sf_.c;
    kkt_solve(rhs, dx2, dy2, dz2);
    w_.y = dy2;
    {
        const double deficit = cone_.interior_deficit(dz2);
        w_.z = (deficit < 0.0) ? dz2 : Vec(dz2 + (1.0 + deficit) * e_);
    }
    w_.tau = 1.0;
    w_.kap = 1.0;

    Vec rhs1 = Vec::Zero(dim);
    rhs1.head(n) = -sf_.c;
    rhs1.segment(n, p) = sf_.b;
    rhs1.tail(m) = sf_.h;

    Vec w_dz(m), wi_ds(m), ds_corr(m), lam_sq(m), tmp(m), ds_final(m);
    double pres_prev = std::numeric_limits<double>::max();
    ExitReason reason = ExitReason::none;
    int iter = 0;

    for (iter = 0; iter <= st_.max_iters; ++iter) {
        compute_residuals();
        update_statistics();
        if (st_.verbose)
            std::printf("it %3d pcost % .6e dcost % .6e gap %.2e pres %.2e dres %.2e mu %.2e\n",
                        iter, stats_.pcost, stats_.dcost, stats_.gap, stats_.pres, stats_.dres,
                        stats_.mu);

        // Unreliable direction: restore the best iterate seen and stop. The
        // residual-growth test only counts above feastol; below that level
        // the ratio is rounding noise.
        if (iter > 0 && ((stats_.pres > 500.0 * pres_prev && stats_.pres > st_.feastol) ||
                         stats_.gap < -st_.abstol || std::isnan(stats_.pcost))) {
            if (have_best_) {
                w_ = best_;
                stats_ = best_stats_;
            }
            reason = check_exit(true);
            if (reason == ExitReason::none) reason = ExitReason::numerics;
            break;
        }
        pres_prev = stats_.pres;

        reason = check_exit(false);
        if (reason != ExitReason::none) break;

        if (iter == st_.max_iters) {
            if (have_best_ && !better_than_best()) {
                w_ = best_;
                stats_ = best_stats_;
            }
            reason = check_exit(true);
            if (reason == ExitReason::none) reason = ExitReason::maxit;
            break;
        }

        if (better_than_best()) {
            best_ = w_;
            best_stats_ = stats_;
            have_best_ = true;
        }

        if (!cone_.update_scalings(w_.s, w_.z, w_.lambda)) {
            if (have_best_) {
                w_ = best_;
                stats_ = best_stats_;
            }
            reason = check_exit(true);
            if (reason == ExitReason::none) reason = ExitReason::numerics;
            break;
        }
        build_w2_blocks();
        kkt_.update_scaling_values(cone_, soc_w2_, psd_w2_);
        {
            bool ok = kkt_.factorize();
            for (int tries = 0; !ok && tries < 3; ++tries) {
                kkt_.delta *= 100.0;
                kkt_.update_scaling_values(cone_, soc_w2_, psd_w2_);
                ok = kkt_.factorize();
            }
            if (!ok) {
                reason = ExitReason::numerics;
                break;
            }
        }

        kkt_solve(rhs1, dx1, dy1, dz1);
        const double dtau_denom =
            w_.kap / w_.tau - (sf_.c.dot(dx1) + sf_.b.dot(dy1) + sf_.h.dot(dz1));
        if (!std::isfinite(dtau_denom) || std::abs(dtau_denom) < 1e-300) {
            reason = ExitReason::numerics;
            break;
        }

        // Affine (predictor) direction.
        rhs.head(n) = rx_;
        rhs.segment(n, p) = -ry_;
        rhs.tail(m) = w_.s - rz_;
        kkt_solve(rhs, dx2, dy2, dz2);
        const double dtau_aff =
            (rt_ - w_.kap + sf_.c.dot(dx2) + sf_.b.dot(dy2) + sf_.h.dot(dz2)) / dtau_denom;
        dz2 += dtau_aff * dz1;
        cone_.apply_W(dz2, w_dz);
        wi_ds = -w_dz - w_.lambda;
        const double dkap_aff = -w_.kap - (w_.kap / w_.tau) * dtau_aff;

        double alpha = cone_.max_step(w_.lambda, wi_ds, 10.0);
        alpha = cone_.max_step(w_.lambda, w_dz, alpha);
        if (dtau_aff < 0.0) alpha = std::min(alpha, -w_.tau / dtau_aff);
        if (dkap_aff < 0.0) alpha = std::min(alpha, -w_.kap / dkap_aff);
        const double alpha_aff = std::min(alpha, 1.0);

        const double sigma =
            std::clamp(std::pow(1.0 - alpha_aff, 3.0), 1e-8, 1.0 - 1e-8);

        // Corrector: ds = lambda o lambda + (W^{-T} ds_aff) o (W dz_aff) - sigma mu e.
        cone_.product(w_.lambda, w_.lambda, lam_sq);
        cone_.product(wi_ds, w_dz, ds_corr);
        ds_corr += lam_sq;
        ds_corr -= sigma * stats_.mu * e_;

        const double one_minus_sigma = 1.0 - sigma;
        cone_.lambda_solve(w_.lambda, ds_corr, tmp);
        cone_.apply_WT(tmp, ds_final);  // W'(lambda \ ds)
        rhs.head(n) = one_minus_sigma * rx_;
        rhs.segment(n, p) = -one_minus_sigma * ry_;
        rhs.tail(m) = -one_minus_sigma * rz_ + ds_final;
        kkt_solve(rhs, dx2, dy2, dz2);

        const double bkap = w_.kap * w_.tau + dkap_aff * dtau_aff - sigma * stats_.mu;
        const double dtau = (one_minus_sigma * rt_ - bkap / w_.tau + sf_.c.dot(dx2) +
                             sf_.b.dot(dy2) + sf_.h.dot(dz2)) /
                            dtau_denom;
        dx2 += dtau * dx1;
        dy2 += dtau * dy1;
        dz2 += dtau * dz1;
        cone_.apply_W(dz2, w_dz);
        // W^{-T} ds = -(lambda \ ds_corr) - W dz
        wi_ds = -tmp - w_dz;
        const double dkap = -(bkap + w_.kap * dtau) / w_.tau;

        alpha = cone_.max_step(w_.lambda, wi_ds, 10.0);
        alpha = cone_.max_step(w_.lambda, w_dz, alpha);
        if (dtau < 0.0) alpha = std::min(alpha, -w_.tau / dtau);
        if (dkap < 0.0) alpha = std::min(alpha, -w_.kap / dkap);
        alpha = std::min(alpha, 1.0);
        const double step = st_.step_scale * alpha;

        if (step < st_.min_step) {
            if (have_best_ && !better_than_best()) {
                w_ = best_;
                stats_ = best_stats_;
            }
            reason = check_exit(true);
            if (reason == ExitReason::none) reason = ExitReason::numerics;
            break;
        }

        cone_.apply_WT(wi_ds, ds_final);  // ds = W' (W^{-T} ds)
        w_.x += step * dx2;
        w_.y += step * dy2;
        w_.z += step * dz2;
        w_.s += step * ds_final;
        w_.tau += step * dtau;
        w_.kap += step * dkap;
    }

    return make_result(reason, iter);
}

}  // namespace

BackendResult IpmBackend::solve_raw(const ConicProgram& prog) {
    const auto t0 = std::chrono::steady_clock::now();
    StandardForm sf = to_standard_form(prog);
    IpmCore core(sf, settings_);
    BackendResult result = core.run();
    result.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

BackendResult solve(const ConicProgram& prog, Backend& backend) {
    prog.validate();
    for (const auto& cone : prog.cones) {
        if (!backend.supports(cone.kind))
            throw CapabilityError(backend.name() + " does not support " +
                                  cone_kind_name(cone.kind) + " cones");
    }
    BackendResult result = backend.solve_raw(prog);
    if (result.status == SolveStatus::optimal) {
        const ProgramResiduals res = prog.residuals(result.primal);
        if (res.equality > 1e-6 || res.cone > 1e-6) {
            result.status = SolveStatus::numerical_failure;
            result.primal.resize(0);
            result.objective_value = std::numeric_limits<double>::quiet_NaN();
        } else {
            result.objective_value = prog.objective_value(result.primal);
        }
    }
    return result;
}

}  // namespace mrmp::conic
