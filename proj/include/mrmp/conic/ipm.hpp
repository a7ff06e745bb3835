#pragma once

#include "mrmp/conic/backend.hpp"

namespace mrmp::conic {

struct IpmSettings {
    int max_iters = 100;
    double feastol = 1e-9;
    double abstol = 1e-9;
    double reltol = 1e-9;
    // Reduced-accuracy thresholds used when the solver stalls near the
    // solution; results at this level still pass the 1e-6 certification in
    // conic::solve or are demoted there.
    double feastol_reduced = 3e-7;
    double abstol_reduced = 1e-7;
    double reltol_reduced = 1e-7;
    double static_reg = 1e-8;
    double step_scale = 0.99;
    double min_step = 1e-8;
    int refine_iters = 3;
    bool verbose = false;
};

// Reference conic backend: homogeneous self-dual primal-dual interior-point
// method with Nesterov-Todd scaling. Handles nonnegative, second-order
// (rotated cones are rewritten to plain second-order during standard-form
// conversion) and PSD cones. Deterministic: identical inputs produce
// bit-identical iterates.
class IpmBackend : public Backend {
public:
    explicit IpmBackend(IpmSettings settings = {}) : settings_(settings) {}

    std::string name() const override { return "mrmp-ipm"; }
    bool supports(ConeKind) const override { return true; }
    BackendResult solve_raw(const ConicProgram& prog) override;

    const IpmSettings& settings() const { return settings_; }

private:
    IpmSettings settings_;
};

// Same engine with psd capability masked off; the parabolic pipeline never
// needs psd cones and this keeps that property checkable.
class SocpOnlyBackend : public Backend {
public:
    explicit SocpOnlyBackend(IpmSettings settings = {}) : inner_(settings) {}

    std::string name() const override { return "mrmp-ipm-socp"; }
    bool supports(ConeKind kind) const override { return kind != ConeKind::psd; }
    BackendResult solve_raw(const ConicProgram& prog) override { return inner_.solve_raw(prog); }

private:
    IpmBackend inner_;
};

}  // namespace mrmp::conic
