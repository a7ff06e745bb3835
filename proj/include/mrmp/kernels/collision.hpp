#pragma once

#include <cstdint>

namespace mrmp::kernels {

// Pairwise separation scan over a joint trajectory.
//
// positions: row-major [entity][step][dim], num_entities * num_steps * dim.
// radii: per entity. Entities are ordered robots first; pairs (i, j) with
// i < j are scanned whenever i < num_robots, i.e. obstacle-obstacle pairs
// are skipped. Returns max over scanned pairs and steps of
// (radii[i] + radii[j] - ||p_i - p_j||)+.
//
// The serial version is the reference; the omp version must produce the
// identical result (max-reduction is order independent).
double max_collision_violation_serial(const double* positions, int num_entities, int num_steps,
                                      int dim, const double* radii, int num_robots);

double max_collision_violation_omp(const double* positions, int num_entities, int num_steps,
                                   int dim, const double* radii, int num_robots);

}  // namespace mrmp::kernels
