#include "mrmp/kernels/spmv.hpp"

namespace mrmp::kernels {

CsrMatrix CsrMatrix::from_sparse(const Eigen::SparseMatrix<double>& m) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> rm(m);
    rm.makeCompressed();
    CsrMatrix out;
    out.rows = static_cast<int>(rm.rows());
    out.cols = static_cast<int>(rm.cols());
    out.row_ptr.assign(rm.outerIndexPtr(), rm.outerIndexPtr() + rm.rows() + 1);
    out.col_idx.assign(rm.innerIndexPtr(), rm.innerIndexPtr() + rm.nonZeros());
    out.vals.assign(rm.valuePtr(), rm.valuePtr() + rm.nonZeros());
    return out;
}

void CsrMatrix::mul_serial(const double* x, double* y) const {
    for (int r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += vals[k] * x[col_idx[k]];
        y[r] = acc;
    }
}

void CsrMatrix::mul_omp(const double* x, double* y) const {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += vals[k] * x[col_idx[k]];
        y[r] = acc;
    }
}

void CsrMatrix::mul_add(const double* x, double* y) const {
    for (int r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += vals[k] * x[col_idx[k]];
        y[r] += acc;
    }
}

}  // namespace mrmp::kernels
