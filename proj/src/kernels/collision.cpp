#include "mrmp/kernels/collision.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mrmp::kernels {

namespace {

inline double pair_step_violation(const double* positions, int num_steps, int dim, int i, int j,
                                  int step, double rsum) {
    const double* pi = positions + (static_cast<int64_t>(i) * num_steps + step) * dim;
    const double* pj = positions + (static_cast<int64_t>(j) * num_steps + step) * dim;
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double d = pi[k] - pj[k];
        d2 += d * d;
    }
    return std::max(0.0, rsum - std::sqrt(d2));
}

}  // namespace

double max_collision_violation_serial(const double* positions, int num_entities, int num_steps,
                                      int dim, const double* radii, int num_robots) {
    double worst = 0.0;
    for (int i = 0; i < num_robots; ++i) {
        for (int j = i + 1; j < num_entities; ++j) {
            const double rsum = radii[i] + radii[j];
            for (int t = 0; t < num_steps; ++t) {
                worst = std::max(worst, pair_step_violation(positions, num_steps, dim, i, j, t, rsum));
            }
        }
    }
    return worst;
}

double max_collision_violation_omp(const double* positions, int num_entities, int num_steps,
                                   int dim, const double* radii, int num_robots) {
    // Flatten the scanned pairs so the loop balances even when robots are a
    // small prefix of the entity list.
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<size_t>(num_robots) * num_entities);
    for (int i = 0; i < num_robots; ++i)
        for (int j = i + 1; j < num_entities; ++j) pairs.emplace_back(i, j);

    const int64_t num_pairs = static_cast<int64_t>(pairs.size());
    double worst = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : worst)
#endif
    for (int64_t k = 0; k < num_pairs; ++k) {
        const auto [i, j] = pairs[k];
        const double rsum = radii[i] + radii[j];
        double local = 0.0;
        for (int t = 0; t < num_steps; ++t) {
            local = std::max(local, pair_step_violation(positions, num_steps, dim, i, j, t, rsum));
        }
        worst = std::max(worst, local);
    }
    return worst;
}

}  // namespace mrmp::kernels
