// hilbert.hpp - composite Fock/qubit spaces, sparse operators and Lindblad superoperators
//
// Density matrices are vectorized by stacking columns (column-major), so that
// vec(A rho B) = (B^T kron A) vec(rho). Every superoperator in the library uses
// this convention.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cqed/errors.hpp"

namespace cqed {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class SubsystemKind { Fock, Qubit };

struct Subsystem {
    SubsystemKind kind{SubsystemKind::Fock};
    std::size_t dim{2};

    static Subsystem fock(std::size_t dim) { return {SubsystemKind::Fock, dim}; }
    static Subsystem qubit() { return {SubsystemKind::Qubit, 2}; }

    bool operator==(const Subsystem&) const = default;
};

class SpaceLayout {
public:
    SpaceLayout() = default;

    const std::vector<Subsystem>& subsystems() const noexcept { return subsystems_; }
    std::size_t size() const noexcept { return subsystems_.size(); }
    const Subsystem& operator[](std::size_t i) const { return subsystems_.at(i); }
    std::size_t total_dim() const noexcept { return total_dim_; }

    bool operator==(const SpaceLayout& other) const { return subsystems_ == other.subsystems_; }

private:
    friend SpaceLayout make_space(std::span<const Subsystem> dims);
    std::vector<Subsystem> subsystems_;
    std::size_t total_dim_{0};
};

// Throws InvalidArgument for an empty list, fock dims < 2, or qubit dims != 2.
SpaceLayout make_space(std::span<const Subsystem> dims);
inline SpaceLayout make_space(std::initializer_list<Subsystem> dims)
{
    return make_space(std::span<const Subsystem>(dims.begin(), dims.size()));
}

class Operator {
public:
    Operator() = default;
    Operator(SpaceLayout layout, SparseMatrix data);

    const SpaceLayout& layout() const noexcept { return layout_; }
    const SparseMatrix& data() const noexcept { return data_; }

    Operator adjoint() const;
    bool is_hermitian(double tol = 1e-10) const;
    double max_abs() const;

    Operator& operator+=(const Operator& rhs);
    Operator& operator-=(const Operator& rhs);
    Operator& operator*=(Complex s);

    friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
    friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
    friend Operator operator-(Operator op) { return op *= Complex(-1.0); }
    friend Operator operator*(Operator op, Complex s) { return op *= s; }
    friend Operator operator*(Complex s, Operator op) { return op *= s; }
    friend Operator operator*(Operator op, double s) { return op *= Complex(s); }
    friend Operator operator*(double s, Operator op) { return op *= Complex(s); }
    friend Operator operator*(const Operator& lhs, const Operator& rhs);

private:
    SpaceLayout layout_;
    SparseMatrix data_;
};

void require_same_layout(const SpaceLayout& a, const SpaceLayout& b, const char* context);

Operator identity(const SpaceLayout& layout);
Operator zero(const SpaceLayout& layout);

// Truncated annihilation operator of Fock subsystem `which`, embedded with identities.
Operator destroy(const SpaceLayout& layout, std::size_t which);
Operator create(const SpaceLayout& layout, std::size_t which);
Operator number(const SpaceLayout& layout, std::size_t which);

struct QubitOps {
    Operator sigma_minus;
    Operator sigma_plus;
    Operator sigma_x;
    Operator sigma_y;
    Operator sigma_z;
};

// Basis ordering for a qubit is (|e>, |g>), so sigma_z = diag(+1, -1) and
// sigma_plus |g> = |e>.
QubitOps qubit_ops(const SpaceLayout& layout, std::size_t which);

class DensityState {
public:
    DensityState() = default;
    DensityState(SpaceLayout layout, DenseMatrix matrix);

    const SpaceLayout& layout() const noexcept { return layout_; }
    const DenseMatrix& matrix() const noexcept { return matrix_; }

    // Checks hermiticity, unit trace and min eigenvalue >= -1e-8.
    void validate(double tol = 1e-10) const;

    static DensityState from_vector(const SpaceLayout& layout, const Vector& vec_rho);
    Vector vectorized() const;

private:
    SpaceLayout layout_;
    DenseMatrix matrix_;
};

// Product state |n_0> (x) |n_1> ... ; for a qubit, level 0 is |e> and level 1 is |g>.
DensityState basis_state(const SpaceLayout& layout, std::span<const std::size_t> levels);
// Thermal state of a single Fock subsystem space with mean occupation nbar.
DensityState thermal_state(const SpaceLayout& layout, double nbar);

Complex expect(const Operator& op, const DensityState& state);

struct Superoperator {
    SpaceLayout layout;
    SparseMatrix data;   // total_dim^2 x total_dim^2, column-major vectorization

    Vector apply(const Vector& vec_rho) const { return data * vec_rho; }
    DenseMatrix apply(const DenseMatrix& rho) const;
};

// L[rho] = -i[H, rho] + sum_c (c rho c^dag - 1/2 {c^dag c, rho}).
// Throws LayoutMismatch, or NonHermitian if H deviates from H^dag by more than 1e-10.
Superoperator liouvillian(const Operator& hamiltonian, std::span<const Operator> collapse);
inline Superoperator liouvillian(const Operator& hamiltonian, std::initializer_list<Operator> collapse)
{
    return liouvillian(hamiltonian, std::span<const Operator>(collapse.begin(), collapse.size()));
}

// Row vector t with t . vec(rho) = Tr(rho).
Vector trace_functional(const SpaceLayout& layout);
// Vector w such that w^H vec(X) = Tr(A X).
Vector expectation_functional(const Operator& op);

} // namespace cqed
