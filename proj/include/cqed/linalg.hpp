// linalg.hpp - sparse complex LU (UMFPACK) and dense eigendecomposition (LAPACK)

#pragma once

#include <memory>
#include <optional>

#include "cqed/hilbert.hpp"

namespace cqed {

class SparseLU {
public:
    // Factorizes a square matrix. Throws NonUniqueSteadyState if the matrix is
    // numerically singular (UMFPACK reports a zero pivot).
    explicit SparseLU(const SparseMatrix& A);
    ~SparseLU();
    SparseLU(SparseLU&&) noexcept;
    SparseLU& operator=(SparseLU&&) noexcept;
    SparseLU(const SparseLU&) = delete;
    SparseLU& operator=(const SparseLU&) = delete;

    Vector solve(const Vector& rhs) const;
    // Solves A^H x = rhs with the same factors.
    Vector solve_adjoint(const Vector& rhs) const;
    // Reciprocal condition number estimate from the LU diagonal.
    double rcond() const noexcept { return rcond_; }
    Eigen::Index rows() const noexcept { return n_; }

private:
    Vector solve_system(const Vector& rhs, int sys) const;

    struct Impl;
    std::unique_ptr<Impl> impl_;
    Eigen::Index n_{0};
    double rcond_{0.0};
};

struct EigenDecomposition {
    Vector values;
    DenseMatrix vectors;   // right eigenvectors, one per column
};

// General complex eigendecomposition; std::nullopt if LAPACK does not converge.
std::optional<EigenDecomposition> eigen_decompose(const DenseMatrix& A);

} // namespace cqed
