// evolve.cpp - steady state, dynamics, regression correlations, FFT spectra

#include "cqed/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/IterativeSolvers>

#include <boost/numeric/odeint.hpp>

#include "cqed/linalg.hpp"

namespace cqed {

namespace {

constexpr double kPi = std::numbers::pi;

// L with row 0 replaced by the trace functional.
SparseMatrix trace_constrained(const SparseMatrix& L, std::size_t dim)
{
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(L.nonZeros()) + dim);
    for (Eigen::Index k = 0; k < L.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(L, k); it; ++it) {
            if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (std::size_t i = 0; i < dim; ++i) trip.emplace_back(0, static_cast<Eigen::Index>(i * dim + i), 1.0);
    SparseMatrix A(L.rows(), L.cols());
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

DenseMatrix unvec(const Vector& v, std::size_t dim)
{
    const auto d = static_cast<Eigen::Index>(dim);
    return Eigen::Map<const DenseMatrix>(v.data(), d, d);
}

Vector vec(const DenseMatrix& m)
{
    return Eigen::Map<const Vector>(m.data(), m.size());
}

bool is_uniform(const std::vector<double>& grid)
{
    if (grid.size() < 2) return false;
    const double h = grid[1] - grid[0];
    if (!(h > 0.0)) return false;
    const double span = std::max(std::abs(grid.front()), std::abs(grid.back()));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * std::max(h, span)) return false;
    }
    return true;
}

} // namespace

SteadyStateResult solve_steady_state(const LindbladModel& model, const SteadyStateOptions& opts)
{
    const Superoperator L = model.liouvillian();
    const std::size_t dim = model.layout.total_dim();
    const Eigen::Index n = L.data.rows();
    const double normF = L.data.norm();
    if (normF == 0.0) fail(ErrorKind::NonUniqueSteadyState, "steady_state: Liouvillian is zero");

    const SparseMatrix A = trace_constrained(L.data, dim);
    Vector rhs = Vector::Zero(n);
    rhs(0) = 1.0;

    SteadyStateResult out;
    Vector x;
    if (opts.force_iterative || static_cast<std::size_t>(n) > opts.iterative_threshold) {
        Eigen::GMRES<SparseMatrix, Eigen::IncompleteLUT<Complex>> solver;
        solver.preconditioner().setDroptol(1e-6);
        solver.preconditioner().setFillfactor(20);
        solver.setTolerance(opts.iterative_tol);
        solver.setMaxIterations(opts.max_iterations);
        solver.set_restart(200);
        solver.compute(A);
        if (solver.info() != Eigen::Success) {
            fail(ErrorKind::NonUniqueSteadyState, "steady_state: preconditioner construction failed");
        }
        x = solver.solve(rhs);
        out.iterations = static_cast<int>(solver.iterations());
        out.method = "gmres";
        if (solver.info() != Eigen::Success) {
            fail(ErrorKind::Convergence, "steady_state: GMRES did not converge after " +
                                             std::to_string(solver.iterations()) + " iterations (residual " +
                                             std::to_string(solver.error()) + ")");
        }
    } else {
        const SparseLU lu(A);
        out.rcond = lu.rcond();
        if (!(out.rcond >= opts.rcond_min)) {
            fail(ErrorKind::NonUniqueSteadyState,
                 "steady_state: trace-constrained Liouvillian is singular (rcond " + std::to_string(out.rcond) + ")");
        }
        x = lu.solve(rhs);
        out.method = "direct";
    }

    DenseMatrix rho = unvec(x, dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace();
    out.residual = (L.data * vec(rho)).norm() / normF;
    if (!(out.residual <= opts.residual_tol)) {
        fail(out.method == "direct" ? ErrorKind::NonUniqueSteadyState : ErrorKind::Convergence,
             "steady_state: residual " + std::to_string(out.residual) + " exceeds tolerance");
    }

    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0.0) {
            out.clipped_mass -= ev(i);
            ev(i) = 0.0;
        }
    }
    DenseMatrix clipped = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    clipped = 0.5 * (clipped + clipped.adjoint()).eval();
    clipped /= clipped.trace();
    out.state = DensityState(model.layout, clipped);
    out.raw = std::move(rho);
    return out;
}

DensityState steady_state(const LindbladModel& model)
{
    return solve_steady_state(model).state;
}

TimeSeries evolve_expectations(const LindbladModel& model, const DensityState& rho0,
                               const std::vector<double>& times, const std::vector<Operator>& observables,
                               const std::vector<std::string>& labels, const EvolveOptions& opts)
{
    require_same_layout(model.layout, rho0.layout(), "evolve_expectations");
    rho0.validate(1e-8);
    if (times.empty()) fail(ErrorKind::InvalidArgument, "evolve_expectations: no output times");
    if (times.front() < 0.0) fail(ErrorKind::InvalidArgument, "evolve_expectations: times must be >= 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            fail(ErrorKind::InvalidArgument, "evolve_expectations: times must be strictly increasing");
        }
    }
    if (!labels.empty() && labels.size() != observables.size()) {
        fail(ErrorKind::InvalidArgument, "evolve_expectations: one label per observable");
    }
    std::vector<Vector> functionals;
    for (const auto& op : observables) {
        require_same_layout(model.layout, op.layout(), "evolve_expectations");
        functionals.push_back(expectation_functional(op));
    }

    const SparseMatrix L = model.liouvillian().data;
    const std::size_t dim = model.layout.total_dim();
    const Eigen::Index n = L.rows();

    TimeSeries ts;
    ts.times = times;
    ts.labels = labels;
    if (ts.labels.empty()) {
        for (std::size_t i = 0; i < observables.size(); ++i) ts.labels.push_back("obs" + std::to_string(i));
    }
    ts.values.assign(observables.size(), {});

    using State = std::vector<double>;
    State x(2 * static_cast<std::size_t>(n));
    Eigen::Map<Vector>(reinterpret_cast<Complex*>(x.data()), n) = rho0.vectorized();

    auto rhs = [&](const State& in, State& out, double) {
        out.resize(in.size());
        Eigen::Map<Vector>(reinterpret_cast<Complex*>(out.data()), n).noalias() =
            L * Eigen::Map<const Vector>(reinterpret_cast<const Complex*>(in.data()), n);
    };
    auto observe = [&](const State& s, double) {
        const Eigen::Map<const Vector> v(reinterpret_cast<const Complex*>(s.data()), n);
        for (std::size_t i = 0; i < functionals.size(); ++i) ts.values[i].push_back(functionals[i].dot(v));
        const DenseMatrix rho = unvec(v, dim);
        ts.trace_drift = std::max(ts.trace_drift, std::abs(rho.trace() - 1.0));
        ts.hermiticity_drift = std::max(ts.hermiticity_drift, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    };

    namespace ode = boost::numeric::odeint;
    std::vector<double> grid;
    const bool prepend = times.front() > 0.0;
    if (prepend) grid.push_back(0.0);
    grid.insert(grid.end(), times.begin(), times.end());
    bool skip_first = prepend;
    auto observer = [&](const State& s, double t) {
        if (skip_first) {
            skip_first = false;
            return;
        }
        observe(s, t);
    };

    auto stepper = ode::make_dense_output(opts.atol, opts.rtol, ode::runge_kutta_dopri5<State>());
    const double span = grid.back() - grid.front();
    const double dt0 = span > 0.0 ? std::min(1e-3, span / 100.0) : 1e-3;
    try {
        ode::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), dt0, observer,
                             ode::max_step_checker(static_cast<int>(std::min<std::size_t>(opts.max_steps, 2'000'000'000))));
    } catch (const ode::odeint_error& e) {
        fail(ErrorKind::Stiffness, std::string("evolve_expectations: step-size control failed (") + e.what() +
                                       "); the problem is stiff, use the reduced/exponential propagator instead");
    }
    return ts;
}

std::vector<Complex> two_time_correlation(const LindbladModel& model, const Operator& A, const Operator& B,
                                          const std::vector<double>& taus, const ReducedOptions& opts,
                                          ReducedDiagnostics* diag)
{
    require_same_layout(model.layout, A.layout(), "two_time_correlation");
    require_same_layout(model.layout, B.layout(), "two_time_correlation");
    for (double t : taus) {
        if (!(t >= 0.0)) fail(ErrorKind::InvalidArgument, "two_time_correlation: taus must be >= 0");
    }
    const SteadyStateResult ss = solve_steady_state(model);
    const Vector y = vec(B.data() * ss.raw);
    const std::vector<Vector> w{expectation_functional(A)};
    const SparseMatrix L = model.liouvillian().data;
    const ReducedPropagator prop(L, y, w, 0.0, {}, opts);
    auto vals = prop.evaluate(taus);
    if (diag) *diag = prop.diagnostics();
    return std::move(vals.front());
}

std::vector<double> one_sided_spectrum(const std::vector<Complex>& corr, double dt,
                                       const std::vector<double>& omega_grid, std::size_t padding)
{
    if (corr.empty()) fail(ErrorKind::InvalidArgument, "one_sided_spectrum: empty correlation");
    if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "one_sided_spectrum: dt must be positive");
    std::size_t npad = 1;
    while (npad < std::max<std::size_t>(padding, 1) * corr.size()) npad <<= 1;

    std::vector<Complex> in(npad, Complex(0.0));
    for (std::size_t k = 0; k < corr.size(); ++k) in[k] = std::conj(corr[k]);
    std::vector<Complex> out;
    Eigen::FFT<double> fft;
    fft.fwd(out, in);

    // S_j = 2 Re dt (sum_k C_k e^{i w_j t_k} - C_0 / 2), w_j = 2 pi j / (npad dt)
    std::vector<double> s(npad);
    for (std::size_t j = 0; j < npad; ++j) s[j] = 2.0 * dt * (std::conj(out[j]) - 0.5 * corr[0]).real();

    const double nyquist = kPi / dt;
    const double scale = static_cast<double>(npad) * dt / (2.0 * kPi);
    std::vector<double> values;
    values.reserve(omega_grid.size());
    for (double w : omega_grid) {
        if (std::abs(w) >= nyquist) {
            fail(ErrorKind::InvalidArgument, "one_sided_spectrum: frequency beyond the Nyquist limit");
        }
        double p = w * scale;
        if (p < 0.0) p += static_cast<double>(npad);
        const auto j0 = static_cast<std::size_t>(std::floor(p)) % npad;
        const std::size_t j1 = (j0 + 1) % npad;
        const double f = p - std::floor(p);
        values.push_back((1.0 - f) * s[j0] + f * s[j1]);
    }
    return values;
}

Spectrum absorption_spectrum(const LindbladModel& model, const std::vector<double>& omega_grid,
                             const SpectrumOptions& opts)
{
    if (model.info.qubit < 0) fail(ErrorKind::InvalidArgument, "absorption_spectrum: model has no qubit");
    const double gamma = model.info.gamma;
    if (!(gamma > 0.0)) fail(ErrorKind::InvalidArgument, "absorption_spectrum: gamma must be positive");
    if (opts.tf_multiplier < opts.min_tf_multiplier) {
        fail(ErrorKind::InvalidArgument, "absorption_spectrum: t_f multiplier below the minimum of " +
                                             std::to_string(opts.min_tf_multiplier));
    }
    if (!is_uniform(omega_grid)) fail(ErrorKind::InvalidArgument, "absorption_spectrum: omega grid must be uniform");

    double omega_max = 0.0;
    for (double w : omega_grid) omega_max = std::max(omega_max, std::abs(w));
    const double dt_max = omega_max > 0.0 ? kPi / (2.0 * omega_max) : 1.0;
    const double dt = opts.dt > 0.0 ? opts.dt : dt_max;
    if (dt > dt_max * (1.0 + 1e-12)) {
        fail(ErrorKind::InvalidArgument, "absorption_spectrum: dt exceeds pi / (2 omega_max)");
    }
    const double t_f = opts.tf_multiplier / gamma;
    const auto samples = static_cast<std::size_t>(std::floor(t_f / dt)) + 1;

    const auto q = static_cast<std::size_t>(model.info.qubit);
    const QubitOps ops = qubit_ops(model.layout, q);
    const SteadyStateResult ss = solve_steady_state(model);
    const Vector y = vec(ops.sigma_plus.data() * ss.raw);
    const std::vector<Vector> w{expectation_functional(ops.sigma_minus)};
    const SparseMatrix L = model.liouvillian().data;
    const double center = 0.5 * (omega_grid.front() + omega_grid.back());
    const ReducedPropagator prop(L, y, w, center, omega_grid, opts.reduced);
    const std::vector<Complex> corr = prop.evaluate_uniform(dt, samples).front();

    const double c0 = std::abs(corr.front());
    if (c0 == 0.0) fail(ErrorKind::InvalidArgument, "absorption_spectrum: correlation vanishes at tau = 0");
    double tail = 0.0;
    for (std::size_t k = samples - std::max<std::size_t>(1, samples / 20); k < samples; ++k) {
        tail = std::max(tail, std::abs(corr[k]));
    }
    tail /= c0;
    if (tail > opts.window_tol) {
        fail(ErrorKind::Window, "absorption_spectrum: correlation has not decayed by t_f = " + std::to_string(t_f) +
                                    " (tail ratio " + std::to_string(tail) + "); increase the t_f multiplier");
    }

    Spectrum spec;
    spec.omegas = omega_grid;
    spec.values = one_sided_spectrum(corr, dt, omega_grid, opts.padding);
    spec.params_hash = model.info.params_hash;
    spec.t_f = t_f;
    spec.dt = dt;
    spec.samples = samples;
    spec.basis_dim = prop.diagnostics().basis_dim;
    spec.method = prop.diagnostics().method;
    spec.trace_drift = prop.diagnostics().trace_drift;
    spec.tail_ratio = tail;
    spec.steady_residual = ss.residual;
    spec.clipped_mass = ss.clipped_mass;
    return spec;
}

TruncationResult adaptive_truncation_check(const ModelBuilder& builder, const SteadyObservable& observable,
                                           const SpaceLayout& start, std::size_t cap, double rel_tol,
                                           std::size_t step)
{
    if (step == 0) fail(ErrorKind::InvalidArgument, "adaptive_truncation_check: step must be positive");
    TruncationResult out;
    SpaceLayout layout = start;
    std::string history;
    while (true) {
        const LindbladModel model = builder(layout);
        const double value = observable(model, steady_state(model));
        out.trace.push_back({layout, value});
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", value);
        history += (history.empty() ? "" : ", ") + std::string(buf);

        if (out.trace.size() >= 2) {
            const double prev = out.trace[out.trace.size() - 2].value;
            const double ref = std::max(std::abs(value), 1e-12);
            if (std::abs(value - prev) <= rel_tol * ref) {
                out.layout = out.trace[out.trace.size() - 2].layout;
                out.value = prev;
                return out;
            }
        }
        std::vector<Subsystem> next = layout.subsystems();
        for (auto& s : next) {
            if (s.kind != SubsystemKind::Fock) continue;
            s.dim += step;
            if (s.dim > cap) {
                fail(ErrorKind::TruncationInsufficient, "adaptive_truncation_check: cap " + std::to_string(cap) +
                                                            " reached without convergence; values: " + history);
            }
        }
        layout = make_space(next);
    }
}

} // namespace cqed
