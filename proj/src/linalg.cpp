// linalg.cpp - UMFPACK wrapper (complex, 64-bit indices) and LAPACK zgeev

#include "cqed/linalg.hpp"

#include <complex>
#include <string>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#include <umfpack.h>

namespace cqed {

struct SparseLU::Impl {
    std::vector<SuiteSparse_long> Ap;
    std::vector<SuiteSparse_long> Ai;
    std::vector<double> Ax;  // interleaved real/imag
    void* numeric{nullptr};
    double control[UMFPACK_CONTROL];

    ~Impl()
    {
        if (numeric) umfpack_zl_free_numeric(&numeric);
    }
};

SparseLU::SparseLU(const SparseMatrix& A) : impl_(std::make_unique<Impl>()), n_(A.rows())
{
    if (A.rows() != A.cols()) fail(ErrorKind::InvalidArgument, "SparseLU: matrix must be square");
    SparseMatrix M = A;
    M.makeCompressed();
    const auto n = static_cast<SuiteSparse_long>(M.rows());
    const Eigen::Index nnz = M.nonZeros();

    Impl& im = *impl_;
    im.Ap.assign(M.outerIndexPtr(), M.outerIndexPtr() + M.cols() + 1);
    im.Ai.assign(M.innerIndexPtr(), M.innerIndexPtr() + nnz);
    const double* raw = reinterpret_cast<const double*>(M.valuePtr());
    im.Ax.assign(raw, raw + 2 * nnz);

    umfpack_zl_defaults(im.control);
    // Liouvillians have a nearly symmetric pattern; nested dissection keeps the fill low.
    im.control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    im.control[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
    double info[UMFPACK_INFO];
    void* symbolic = nullptr;
    SuiteSparse_long status = umfpack_zl_symbolic(n, n, im.Ap.data(), im.Ai.data(), im.Ax.data(), nullptr,
                                                  &symbolic, im.control, info);
    if (status != UMFPACK_OK) {
        if (symbolic) umfpack_zl_free_symbolic(&symbolic);
        fail(ErrorKind::InvalidArgument, "SparseLU: symbolic analysis failed (status " +
                                             std::to_string(status) + ")");
    }
    status = umfpack_zl_numeric(im.Ap.data(), im.Ai.data(), im.Ax.data(), nullptr, symbolic, &im.numeric,
                                im.control, info);
    umfpack_zl_free_symbolic(&symbolic);
    if (status == UMFPACK_WARNING_singular_matrix) {
        fail(ErrorKind::NonUniqueSteadyState, "SparseLU: matrix is singular");
    }
    if (status != UMFPACK_OK) {
        fail(ErrorKind::InvalidArgument, "SparseLU: numeric factorization failed (status " +
                                             std::to_string(status) + ")");
    }
    rcond_ = info[UMFPACK_RCOND];

}

SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

Vector SparseLU::solve(const Vector& rhs) const
{
    return solve_system(rhs, UMFPACK_A);
}

Vector SparseLU::solve_adjoint(const Vector& rhs) const
{
    return solve_system(rhs, UMFPACK_At);
}

Vector SparseLU::solve_system(const Vector& rhs, int sys) const
{
    if (rhs.size() != n_) fail(ErrorKind::InvalidArgument, "SparseLU::solve: size mismatch");
    Vector x(n_);
    double info[UMFPACK_INFO];
    const Impl& im = *impl_;
    const SuiteSparse_long status =
        umfpack_zl_solve(sys, im.Ap.data(), im.Ai.data(), im.Ax.data(), nullptr,
                         reinterpret_cast<double*>(x.data()), nullptr,
                         reinterpret_cast<const double*>(rhs.data()), nullptr, im.numeric, im.control, info);
    if (status != UMFPACK_OK) {
        fail(ErrorKind::NonUniqueSteadyState, "SparseLU::solve failed (status " + std::to_string(status) + ")");
    }
    return x;
}

std::optional<EigenDecomposition> eigen_decompose(const DenseMatrix& A)
{
    if (A.rows() != A.cols()) fail(ErrorKind::InvalidArgument, "eigen_decompose: matrix is not square");
    const auto n = static_cast<lapack_int>(A.rows());
    DenseMatrix work = A;
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n,
                                          work.data(), n,
                                          out.values.data(), nullptr, 1,
                                          out.vectors.data(), n);
    if (info != 0) return std::nullopt;
    return out;
}

} // namespace cqed
