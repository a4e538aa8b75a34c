// propagator.cpp - exact and shift-invert Krylov reduced propagators

#include "cqed/propagator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "cqed/linalg.hpp"

namespace cqed {

namespace {

constexpr std::size_t kMaxProbes = 48;

std::vector<double> pick_probes(std::span<const double> probe_omegas, double omega_center)
{
    std::vector<double> out;
    if (probe_omegas.empty()) {
        for (int k = -16; k <= 16; ++k) out.push_back(omega_center + 0.01 * k);
        return out;
    }
    const std::size_t n = probe_omegas.size();
    const std::size_t stride = std::max<std::size_t>(1, (n + kMaxProbes - 1) / kMaxProbes);
    for (std::size_t i = 0; i < n; i += stride) out.push_back(probe_omegas[i]);
    if ((n - 1) % stride != 0) out.push_back(probe_omegas[n - 1]);
    return out;
}

// -w^H (Lm + i omega)^{-1} ym for every probe.
Vector probe_response(const DenseMatrix& Lm, const Vector& ym, const Vector& wm, const std::vector<double>& probes)
{
    Vector out(static_cast<Eigen::Index>(probes.size()));
    const auto m = Lm.rows();
    for (std::size_t i = 0; i < probes.size(); ++i) {
        DenseMatrix A = Lm;
        A.diagonal().array() += Complex(0.0, probes[i]);
        const Vector x = A.partialPivLu().solve(ym);
        out(static_cast<Eigen::Index>(i)) = -wm.head(m).dot(x);
    }
    return out;
}

// Orthogonalizes v against the first `cols` columns of V twice; returns the norm before.
double orthogonalize(const DenseMatrix& V, Eigen::Index cols, Vector& v)
{
    const double before = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            v -= V.col(j) * V.col(j).dot(v);
        }
    }
    return before;
}

} // namespace

ReducedPropagator::ReducedPropagator(const SparseMatrix& L, const Vector& y, std::span<const Vector> functionals,
                                     double omega_center, std::span<const double> probe_omegas,
                                     const ReducedOptions& opts)
{
    const Eigen::Index n = L.rows();
    if (L.cols() != n || y.size() != n) fail(ErrorKind::InvalidArgument, "ReducedPropagator: size mismatch");
    const auto dim = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
    if (dim * dim != static_cast<std::size_t>(n)) {
        fail(ErrorKind::InvalidArgument, "ReducedPropagator: generator is not a superoperator");
    }
    for (const auto& w : functionals) {
        if (w.size() != n) fail(ErrorKind::InvalidArgument, "ReducedPropagator: functional size mismatch");
    }
    // trace functional, appended after the caller's functionals
    Vector t = Vector::Zero(n);
    for (std::size_t i = 0; i < dim; ++i) t(static_cast<Eigen::Index>(i * dim + i)) = 1.0;
    trace_y_ = t.dot(y);

    std::vector<Vector> all(functionals.begin(), functionals.end());
    all.push_back(t);
    const auto nf = static_cast<Eigen::Index>(all.size());
    const std::vector<double> probes = pick_probes(probe_omegas, omega_center);

    if (static_cast<std::size_t>(n) <= opts.exact_limit) {
        diag_.method = "exact";
        Lm_ = DenseMatrix(L);
        ym_ = y;
        Wm_.resize(n, nf);
        for (Eigen::Index i = 0; i < nf; ++i) Wm_.col(i) = all[static_cast<std::size_t>(i)];
        diag_.basis_dim = static_cast<std::size_t>(n);
        build_modal();
        return;
    }

    diag_.method = "krylov";
    const double y_norm = y.norm();
    if (y_norm == 0.0) fail(ErrorKind::InvalidArgument, "ReducedPropagator: start vector is zero");

    double sigma = 0.02;
    if (!probe_omegas.empty()) {
        const auto [lo, hi] = std::minmax_element(probe_omegas.begin(), probe_omegas.end());
        sigma = std::max(sigma, 0.5 * (*hi - *lo));
    }
    const Complex z0 = opts.shift.value_or(Complex(sigma, -omega_center));
    SparseMatrix shifted = L;
    {
        SparseMatrix I(n, n);
        I.setIdentity();
        shifted -= z0 * I;
    }
    const SparseLU lu(shifted);

    // Shift-invert Arnoldi: H = V^H (L - z0)^{-1} V, reduced generator z0 + H^{-1}.
    // Images of chain vectors are consumed by the next chain step, so row
    // entries against them vanish once that step is taken; only the images of
    // the extra (functional) vectors and the pending chain image are kept.
    const auto max_dim = static_cast<Eigen::Index>(std::min<std::size_t>(opts.max_dim, static_cast<std::size_t>(n)));
    DenseMatrix V(n, max_dim);
    DenseMatrix H = DenseMatrix::Zero(max_dim, max_dim);
    Eigen::Index m = 0;
    std::vector<std::pair<Eigen::Index, Vector>> extra_images;
    Eigen::Index pending_col = -1;
    Vector pending;

    // Returns false when v is (numerically) in the span already.
    auto append = [&](Vector v, bool chain) -> bool {
        const double before = orthogonalize(V, m, v);
        const double after = v.norm();
        if (after <= 1e-12 * std::max(before, 1e-300)) return false;
        V.col(m) = v / after;
        for (const auto& [col, img] : extra_images) H(m, col) = V.col(m).dot(img);
        if (pending_col >= 0) H(m, pending_col) = V.col(m).dot(pending);
        Vector u = lu.solve(V.col(m));
        for (Eigen::Index i = 0; i <= m; ++i) H(i, m) = V.col(i).dot(u);
        if (chain) {
            pending_col = m;
            pending = std::move(u);
        } else {
            extra_images.emplace_back(m, std::move(u));
        }
        ++m;
        return true;
    };

    auto reduced = [&](Eigen::Index k) {
        DenseMatrix G = H.topLeftCorner(k, k).partialPivLu().inverse();
        G.diagonal().array() += z0;
        return G;
    };

    append(y / y_norm, true);
    for (const auto& w : all) {
        if (m < max_dim) append(w, false);
    }
    bool open = true;

    Vector previous;
    bool converged = false;
    double change = 1.0;
    while (!converged) {
        const Eigen::Index target = std::min<Eigen::Index>(max_dim, m + static_cast<Eigen::Index>(opts.block));
        while (m < target && open) {
            open = append(pending, true);
        }
        const bool exhausted = !open;
        const DenseMatrix Lsub = reduced(m);
        const Vector ysub = V.leftCols(m).adjoint() * y;
        const Vector wsub = V.leftCols(m).adjoint() * all.front();
        const Vector response = probe_response(Lsub, ysub, wsub, probes);
        if (previous.size() == response.size()) {
            const double scale = std::max(response.cwiseAbs().maxCoeff(), 1e-300);
            change = (response - previous).cwiseAbs().maxCoeff() / scale;
            if (change <= opts.tol) converged = true;
        }
        previous = response;
        if (exhausted) {
            converged = true;
            change = 0.0;
        }
        if (!converged && m >= max_dim) {
            fail(ErrorKind::Convergence, "ReducedPropagator: basis reached " + std::to_string(m) +
                                             " vectors with relative change " + std::to_string(change));
        }
    }

    diag_.basis_dim = static_cast<std::size_t>(m);
    diag_.last_change = change;
    Lm_ = reduced(m);
    ym_ = V.leftCols(m).adjoint() * y;
    Wm_.resize(m, nf);
    for (Eigen::Index i = 0; i < nf; ++i) Wm_.col(i) = V.leftCols(m).adjoint() * all[static_cast<std::size_t>(i)];
    build_modal();
}

std::vector<Complex> ReducedPropagator::response(std::span<const double> omegas) const
{
    const std::vector<double> probes(omegas.begin(), omegas.end());
    const Vector r = probe_response(Lm_, ym_, Wm_.col(0), probes);
    return {r.data(), r.data() + r.size()};
}

void ReducedPropagator::build_modal()
{
    const auto m = Lm_.rows();
    const auto es = eigen_decompose(Lm_);
    if (!es) {
        diag_.modal = false;
        return;
    }
    const DenseMatrix& X = es->vectors;
    Eigen::PartialPivLU<DenseMatrix> lu(X);
    const DenseMatrix Xinv = lu.inverse();
    const double cond = X.cwiseAbs().colwise().sum().maxCoeff() * Xinv.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(cond) || cond > 1e10) {
        diag_.modal = false;
        return;
    }
    lambda_ = es->values;
    right_ = Xinv * ym_;
    left_ = Wm_.adjoint() * X;
    // Modes that grow must carry negligible weight.
    const double scale = std::max(1.0, lambda_.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < m; ++k) {
        if (lambda_(k).real() > 1e-10 * scale) {
            const double weight = (left_.col(k) * right_(k)).cwiseAbs().maxCoeff();
            if (weight > 1e-12 * std::max(1.0, ym_.norm())) {
                fail(ErrorKind::Convergence, "ReducedPropagator: reduced generator has a growing mode (Re = " +
                                                 std::to_string(lambda_(k).real()) + ")");
            }
            right_(k) = 0.0;
        }
    }
    diag_.modal = true;
}

std::vector<std::vector<Complex>> ReducedPropagator::evaluate(std::span<const double> times) const
{
    if (!diag_.modal) return evaluate_stepping(times);
    const auto nf = Wm_.cols();
    std::vector<std::vector<Complex>> out(static_cast<std::size_t>(nf), std::vector<Complex>(times.size()));
    Vector e(lambda_.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (Eigen::Index j = 0; j < lambda_.size(); ++j) e(j) = std::exp(lambda_(j) * times[k]) * right_(j);
        const Vector v = left_ * e;
        for (Eigen::Index i = 0; i < nf; ++i) out[static_cast<std::size_t>(i)][k] = v(i);
    }
    double drift = 0.0;
    for (const Complex& tr : out.back()) drift = std::max(drift, std::abs(tr - trace_y_));
    diag_.trace_drift = std::max(diag_.trace_drift, drift);
    out.pop_back();
    return out;
}

std::vector<std::vector<Complex>> ReducedPropagator::evaluate_uniform(double dt, std::size_t n) const
{
    const auto nf = Wm_.cols();
    std::vector<std::vector<Complex>> out(static_cast<std::size_t>(nf), std::vector<Complex>(n));
    if (diag_.modal) {
        // e^{lambda (k+1) dt} = e^{lambda k dt} e^{lambda dt}
        const Vector step = (lambda_ * dt).array().exp();
        Vector e = right_;
        for (std::size_t k = 0; k < n; ++k) {
            const Vector v = left_ * e;
            for (Eigen::Index i = 0; i < nf; ++i) out[static_cast<std::size_t>(i)][k] = v(i);
            e = e.cwiseProduct(step);
            // keep decayed modes out of the subnormal range
            if (k % 64 == 63) {
                for (Eigen::Index j = 0; j < e.size(); ++j) {
                    if (std::abs(e(j)) < 1e-200) e(j) = 0.0;
                }
            }
        }
        double drift = 0.0;
        for (const Complex& tr : out.back()) drift = std::max(drift, std::abs(tr - trace_y_));
        diag_.trace_drift = std::max(diag_.trace_drift, drift);
        out.pop_back();
        return out;
    }

    const DenseMatrix P = (Lm_ * dt).exp();
    Vector v = ym_;
    for (std::size_t k = 0; k < n; ++k) {
        const Vector vals = Wm_.adjoint() * v;
        for (Eigen::Index i = 0; i < nf; ++i) out[static_cast<std::size_t>(i)][k] = vals(i);
        v = P * v;
    }
    double drift = 0.0;
    for (const Complex& tr : out.back()) drift = std::max(drift, std::abs(tr - trace_y_));
    diag_.trace_drift = std::max(diag_.trace_drift, drift);
    out.pop_back();
    return out;
}

std::vector<std::vector<Complex>> ReducedPropagator::evaluate_stepping(std::span<const double> times) const
{
    const auto nf = Wm_.cols();
    std::vector<std::vector<Complex>> out(static_cast<std::size_t>(nf), std::vector<Complex>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k) {
        const Vector v = (Lm_ * times[k]).exp() * ym_;
        const Vector vals = Wm_.adjoint() * v;
        for (Eigen::Index i = 0; i < nf; ++i) out[static_cast<std::size_t>(i)][k] = vals(i);
    }
    double drift = 0.0;
    for (const Complex& tr : out.back()) drift = std::max(drift, std::abs(tr - trace_y_));
    diag_.trace_drift = std::max(diag_.trace_drift, drift);
    out.pop_back();
    return out;
}

} // namespace cqed
