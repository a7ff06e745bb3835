#pragma once

#include <Eigen/Sparse>
#include <vector>

namespace mrmp::kernels {

// Compressed-sparse-row matrix with a serial and an OpenMP matvec. One
// thread owns each output row, so both versions produce bit-identical
// results. Used in the solver's hot loop (residuals, refinement), where the
// column-major Eigen storage would serialize badly.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;  // rows + 1
    std::vector<int> col_idx;
    std::vector<double> vals;

    static CsrMatrix from_sparse(const Eigen::SparseMatrix<double>& m);

    // y = A x
    void mul_serial(const double* x, double* y) const;
    void mul_omp(const double* x, double* y) const;

    // y += A x (serial)
    void mul_add(const double* x, double* y) const;
};

}  // namespace mrmp::kernels
