#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mrmp::par {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline double wtime() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return 0.0;
#endif
}

// Static-schedule parallel loop. Every kernel built on top of this writes
// disjoint outputs or combines with order-independent reductions (max), so
// results are bit-identical for any thread count.
template <typename Fn>
void for_range(int64_t begin, int64_t end, Fn&& fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int64_t i = begin; i < end; ++i) fn(i);
#else
    for (int64_t i = begin; i < end; ++i) fn(i);
#endif
}

}  // namespace mrmp::par
