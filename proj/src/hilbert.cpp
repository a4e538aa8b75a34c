// hilbert.cpp - composite spaces, operator embedding and Liouvillian assembly

#include "cqed/hilbert.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace cqed {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::LayoutMismatch: return "layout-mismatch";
    case ErrorKind::NonHermitian: return "non-hermitian";
    case ErrorKind::Threshold: return "threshold";
    case ErrorKind::Instability: return "instability";
    case ErrorKind::PhaseMismatch: return "phase-mismatch";
    case ErrorKind::NonUniqueSteadyState: return "non-unique-steady-state";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Stiffness: return "stiffness";
    case ErrorKind::Window: return "window";
    case ErrorKind::TruncationInsufficient: return "truncation-insufficient";
    case ErrorKind::NoPeaks: return "no-peaks";
    case ErrorKind::InsufficientPeaks: return "insufficient-peaks";
    case ErrorKind::MultiPeak: return "multi-peak";
    case ErrorKind::ConfigSyntax: return "config-syntax";
    case ErrorKind::ConfigValidation: return "config-validation";
    }
    return "unknown";
}

SpaceLayout make_space(std::span<const Subsystem> dims)
{
    if (dims.empty()) {
        fail(ErrorKind::InvalidArgument, "make_space: at least one subsystem is required");
    }
    SpaceLayout layout;
    std::size_t total = 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const Subsystem& s = dims[i];
        if (s.kind == SubsystemKind::Fock && s.dim < 2) {
            fail(ErrorKind::InvalidArgument,
                 "make_space: fock subsystem " + std::to_string(i) + " needs dim >= 2, got " +
                     std::to_string(s.dim));
        }
        if (s.kind == SubsystemKind::Qubit && s.dim != 2) {
            fail(ErrorKind::InvalidArgument, "make_space: qubit subsystem must have dim 2");
        }
        total *= s.dim;
    }
    layout.subsystems_.assign(dims.begin(), dims.end());
    layout.total_dim_ = total;
    return layout;
}

void require_same_layout(const SpaceLayout& a, const SpaceLayout& b, const char* context)
{
    if (!(a == b)) {
        fail(ErrorKind::LayoutMismatch, std::string(context) + ": operands live on different layouts");
    }
}

Operator::Operator(SpaceLayout layout, SparseMatrix data)
    : layout_(std::move(layout)), data_(std::move(data))
{
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (data_.rows() != n || data_.cols() != n) {
        fail(ErrorKind::LayoutMismatch, "Operator: matrix shape does not match layout dimension");
    }
    data_.makeCompressed();
}

Operator Operator::adjoint() const
{
    SparseMatrix adj = data_.adjoint();
    return Operator(layout_, std::move(adj));
}

double Operator::max_abs() const
{
    double m = 0.0;
    for (int k = 0; k < data_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(data_, k); it; ++it) {
            m = std::max(m, std::abs(it.value()));
        }
    }
    return m;
}

bool Operator::is_hermitian(double tol) const
{
    SparseMatrix diff = data_ - SparseMatrix(data_.adjoint());
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
            if (std::abs(it.value()) > tol) return false;
        }
    }
    return true;
}

Operator& Operator::operator+=(const Operator& rhs)
{
    require_same_layout(layout_, rhs.layout_, "operator+");
    data_ += rhs.data_;
    return *this;
}

Operator& Operator::operator-=(const Operator& rhs)
{
    require_same_layout(layout_, rhs.layout_, "operator-");
    data_ -= rhs.data_;
    return *this;
}

Operator& Operator::operator*=(Complex s)
{
    data_ *= s;
    return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs)
{
    require_same_layout(lhs.layout_, rhs.layout_, "operator*");
    SparseMatrix prod = lhs.data_ * rhs.data_;
    prod.prune(Complex(0.0));
    return Operator(lhs.layout_, std::move(prod));
}

namespace {

SparseMatrix sparse_identity(std::size_t n)
{
    SparseMatrix id(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    id.setIdentity();
    return id;
}

// Embed a local matrix acting on subsystem `which` into the full layout.
Operator embed(const SpaceLayout& layout, std::size_t which, const SparseMatrix& local)
{
    SparseMatrix full = sparse_identity(1);
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const SparseMatrix factor = (i == which) ? local : sparse_identity(layout[i].dim);
        SparseMatrix next = Eigen::kroneckerProduct(full, factor);
        full = std::move(next);
    }
    return Operator(layout, std::move(full));
}

void require_index(const SpaceLayout& layout, std::size_t which, SubsystemKind kind, const char* context)
{
    if (which >= layout.size()) {
        fail(ErrorKind::InvalidArgument, std::string(context) + ": subsystem index out of range");
    }
    if (layout[which].kind != kind) {
        fail(ErrorKind::InvalidArgument,
             std::string(context) + ": subsystem " + std::to_string(which) +
                 (kind == SubsystemKind::Fock ? " is not a fock mode" : " is not a qubit"));
    }
}

} // namespace

Operator identity(const SpaceLayout& layout)
{
    return Operator(layout, sparse_identity(layout.total_dim()));
}

Operator zero(const SpaceLayout& layout)
{
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return Operator(layout, SparseMatrix(n, n));
}

Operator destroy(const SpaceLayout& layout, std::size_t which)
{
    require_index(layout, which, SubsystemKind::Fock, "destroy");
    const auto dim = static_cast<Eigen::Index>(layout[which].dim);
    SparseMatrix a(dim, dim);
    a.reserve(Eigen::VectorXi::Constant(dim, 1));
    for (Eigen::Index n = 1; n < dim; ++n) {
        a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return embed(layout, which, a);
}

Operator create(const SpaceLayout& layout, std::size_t which)
{
    return destroy(layout, which).adjoint();
}

Operator number(const SpaceLayout& layout, std::size_t which)
{
    const Operator a = destroy(layout, which);
    return a.adjoint() * a;
}

QubitOps qubit_ops(const SpaceLayout& layout, std::size_t which)
{
    require_index(layout, which, SubsystemKind::Qubit, "qubit_ops");
    const Complex i(0.0, 1.0);
    // basis (|e>, |g>)
    SparseMatrix sm(2, 2), sp(2, 2), sx(2, 2), sy(2, 2), sz(2, 2);
    sm.insert(1, 0) = 1.0;
    sp.insert(0, 1) = 1.0;
    sx.insert(0, 1) = 1.0;
    sx.insert(1, 0) = 1.0;
    sy.insert(0, 1) = -i;
    sy.insert(1, 0) = i;
    sz.insert(0, 0) = 1.0;
    sz.insert(1, 1) = -1.0;
    return QubitOps{embed(layout, which, sm), embed(layout, which, sp), embed(layout, which, sx),
                    embed(layout, which, sy), embed(layout, which, sz)};
}

DensityState::DensityState(SpaceLayout layout, DenseMatrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix))
{
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (matrix_.rows() != n || matrix_.cols() != n) {
        fail(ErrorKind::LayoutMismatch, "DensityState: matrix shape does not match layout dimension");
    }
}

void DensityState::validate(double tol) const
{
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) {
        fail(ErrorKind::NonHermitian, "DensityState: matrix is not hermitian (deviation " +
                                          std::to_string(herm) + ")");
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - Complex(1.0)) > tol) {
        fail(ErrorKind::InvalidArgument, "DensityState: trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8) {
        fail(ErrorKind::InvalidArgument, "DensityState: matrix has a negative eigenvalue");
    }
}

DensityState DensityState::from_vector(const SpaceLayout& layout, const Vector& vec_rho)
{
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    if (vec_rho.size() != n * n) {
        fail(ErrorKind::LayoutMismatch, "DensityState::from_vector: vector length mismatch");
    }
    DenseMatrix m = Eigen::Map<const DenseMatrix>(vec_rho.data(), n, n);
    return DensityState(layout, std::move(m));
}

Vector DensityState::vectorized() const
{
    return Eigen::Map<const Vector>(matrix_.data(), matrix_.size());
}

DensityState basis_state(const SpaceLayout& layout, std::span<const std::size_t> levels)
{
    if (levels.size() != layout.size()) {
        fail(ErrorKind::InvalidArgument, "basis_state: one level per subsystem is required");
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (levels[i] >= layout[i].dim) {
            fail(ErrorKind::InvalidArgument, "basis_state: level exceeds subsystem dimension");
        }
        index = index * layout[i].dim + levels[i];
    }
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    DenseMatrix rho = DenseMatrix::Zero(n, n);
    rho(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return DensityState(layout, std::move(rho));
}

DensityState thermal_state(const SpaceLayout& layout, double nbar)
{
    if (layout.size() != 1 || layout[0].kind != SubsystemKind::Fock) {
        fail(ErrorKind::InvalidArgument, "thermal_state: layout must be a single fock mode");
    }
    if (nbar < 0.0) {
        fail(ErrorKind::InvalidArgument, "thermal_state: nbar must be non-negative");
    }
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    DenseMatrix rho = DenseMatrix::Zero(n, n);
    const double q = nbar / (1.0 + nbar);
    double norm = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double p = std::pow(q, static_cast<double>(k));
        rho(k, k) = p;
        norm += p;
    }
    rho /= norm;
    return DensityState(layout, std::move(rho));
}

Complex expect(const Operator& op, const DensityState& state)
{
    require_same_layout(op.layout(), state.layout(), "expect");
    // Tr(A rho) = sum_{ij} A_ij rho_ji
    Complex acc(0.0);
    const SparseMatrix& a = op.data();
    const DenseMatrix& rho = state.matrix();
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            acc += it.value() * rho(col, it.row());
        }
    }
    return acc;
}

DenseMatrix Superoperator::apply(const DenseMatrix& rho) const
{
    const Eigen::Index n = rho.rows();
    Vector v = Eigen::Map<const Vector>(rho.data(), rho.size());
    Vector out = data * v;
    return Eigen::Map<const DenseMatrix>(out.data(), n, n);
}

Superoperator liouvillian(const Operator& hamiltonian, std::span<const Operator> collapse)
{
    const SpaceLayout& layout = hamiltonian.layout();
    for (const Operator& c : collapse) {
        require_same_layout(layout, c.layout(), "liouvillian");
    }
    if (!hamiltonian.is_hermitian(1e-10)) {
        fail(ErrorKind::NonHermitian, "liouvillian: Hamiltonian is not hermitian within 1e-10");
    }
    const std::size_t n = layout.total_dim();
    const SparseMatrix id = sparse_identity(n);
    const Complex i(0.0, 1.0);

    // K = -i H - 1/2 sum c^dag c ; L = I (x) K + conj(K) (x) I + sum conj(c) (x) c
    SparseMatrix k = -i * hamiltonian.data();
    for (const Operator& c : collapse) {
        SparseMatrix cdc = c.data().adjoint() * c.data();
        k -= 0.5 * cdc;
    }
    SparseMatrix k_conj = k.conjugate();
    SparseMatrix l = Eigen::kroneckerProduct(id, k);
    l += SparseMatrix(Eigen::kroneckerProduct(k_conj, id));
    for (const Operator& c : collapse) {
        SparseMatrix c_conj = c.data().conjugate();
        l += SparseMatrix(Eigen::kroneckerProduct(c_conj, c.data()));
    }
    l.prune(Complex(0.0));
    l.makeCompressed();
    return Superoperator{layout, std::move(l)};
}

Vector trace_functional(const SpaceLayout& layout)
{
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    Vector t = Vector::Zero(n * n);
    for (Eigen::Index k = 0; k < n; ++k) t(k + k * n) = 1.0;
    return t;
}

Vector expectation_functional(const Operator& op)
{
    // Tr(A X) = sum_{ij} A_ij X_ji = w^H vec(X) with w_{j + i n} = conj(A_ij)
    const auto n = static_cast<Eigen::Index>(op.layout().total_dim());
    Vector w = Vector::Zero(n * n);
    const SparseMatrix& a = op.data();
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            w(col + it.row() * n) = std::conj(it.value());
        }
    }
    return w;
}

} // namespace cqed
