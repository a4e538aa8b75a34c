// model.cpp - ideal-bath, cascade and fit model builders

#include "cqed/model.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace cqed {

namespace {

constexpr double kPi = std::numbers::pi;

void require_rate(double value, const char* name)
{
    if (!(value >= 0.0) || !std::isfinite(value)) {
        fail(ErrorKind::InvalidArgument, std::string(name) + " must be finite and non-negative");
    }
}

void require_finite(double value, const char* name)
{
    if (!std::isfinite(value)) fail(ErrorKind::InvalidArgument, std::string(name) + " must be finite");
}

struct Modes {
    int a{-1};
    int b{-1};
    int q{-1};
};

// Checks the layout against the expected shape: `fock_modes` Fock subsystems
// followed by an optional qubit.
Modes resolve_modes(const SpaceLayout& layout, std::size_t fock_modes, const char* builder)
{
    const std::size_t n = layout.size();
    if (n != fock_modes && n != fock_modes + 1) {
        fail(ErrorKind::InvalidArgument, std::string(builder) + ": truncation needs " +
                                             std::to_string(fock_modes) +
                                             " fock modes and an optional qubit");
    }
    for (std::size_t i = 0; i < fock_modes; ++i) {
        if (layout[i].kind != SubsystemKind::Fock) {
            fail(ErrorKind::InvalidArgument,
                 std::string(builder) + ": subsystem " + std::to_string(i) + " must be fock");
        }
    }
    if (n == fock_modes + 1 && layout[fock_modes].kind != SubsystemKind::Qubit) {
        fail(ErrorKind::InvalidArgument, std::string(builder) + ": last subsystem must be a qubit");
    }
    Modes m;
    if (fock_modes == 2) {
        m.a = 0;
        m.b = 1;
    } else {
        m.b = 0;
    }
    if (n == fock_modes + 1) m.q = static_cast<int>(fock_modes);
    return m;
}

// (b, b^dag) = T (beta, beta^dag) for b = c beta + e^{-i theta} s beta^dag.
Eigen::Matrix2cd bogoliubov_T(double r, double theta)
{
    const double c = std::cosh(r);
    const double s = std::sinh(r);
    Eigen::Matrix2cd T;
    T << Complex(c), std::polar(s, -theta), std::polar(s, theta), Complex(c);
    return T;
}

// Lab-basis Kossakowski matrix of a squeezed bath (r_e, theta_e) at rate kappa
// plus vacuum loss at rate kappa_i.
Eigen::Matrix2cd bath_matrix(double kappa, double r_e, double theta_e, double kappa_i)
{
    const double ce = std::cosh(r_e);
    const double se = std::sinh(r_e);
    Eigen::Matrix2cd K;
    K << Complex(kappa * ce * ce + kappa_i), kappa * std::polar(ce * se, -theta_e),
        kappa * std::polar(ce * se, theta_e), Complex(kappa * se * se);
    return K;
}

Operator bogoliubov_b(const SpaceLayout& layout, int mode, double r, double theta)
{
    const Operator beta = destroy(layout, static_cast<std::size_t>(mode));
    return beta * std::cosh(r) + beta.adjoint() * std::polar(std::sinh(r), -theta);
}

// Intracavity b Hamiltonian plus qubit terms, in the requested frame.
Operator cavity_qubit_hamiltonian(const SystemParams& p, const SpaceLayout& layout, const Modes& m)
{
    const auto mb = static_cast<std::size_t>(m.b);
    const double r = p.squeeze.r;
    const double theta = p.squeeze.theta;
    Operator H = zero(layout);
    const Operator b = destroy(layout, mb);
    const Operator bd = b.adjoint();

    if (p.frame == Frame::Lab) {
        const Complex E = p.effective_E_b();
        H += number(layout, mb) * p.delta_b;
        H -= (bd * bd * E + b * b * std::conj(E)) * 0.5;
    } else {
        H += number(layout, mb) * p.delta_beta();
    }

    if (m.q < 0) return H;
    const QubitOps q = qubit_ops(layout, static_cast<std::size_t>(m.q));
    H += q.sigma_z * (0.5 * p.delta_q);
    if (p.g == 0.0) return H;

    if (p.frame == Frame::Lab) {
        H += (bd * q.sigma_minus + b * q.sigma_plus) * p.g;
        return H;
    }
    // Bogoliubov frame: b -> c beta + e^{-i theta} s beta^dag, split into the
    // enhanced term and the e^{-r} remainder.
    const Complex ph = std::polar(1.0, 0.5 * theta);
    const Operator beta_p = bd * std::conj(ph) + b * ph;
    const Operator beta_m = b * ph - bd * std::conj(ph);
    const Operator sig_p = q.sigma_minus * ph + q.sigma_plus * std::conj(ph);
    const Operator sig_m = q.sigma_minus * ph - q.sigma_plus * std::conj(ph);
    H += beta_p * sig_p * (0.5 * p.g * std::exp(r));
    if (p.include_h_err) H -= beta_m * sig_m * (0.5 * p.g * std::exp(-r));
    return H;
}

void append_qubit_decay(std::vector<Operator>& out, const SystemParams& p, const SpaceLayout& layout,
                        const Modes& m)
{
    if (m.q < 0 || p.gamma == 0.0) return;
    out.push_back(qubit_ops(layout, static_cast<std::size_t>(m.q)).sigma_minus * std::sqrt(p.gamma));
}

ModelInfo make_info(const char* builder, const SystemParams& p, const Modes& m)
{
    ModelInfo info;
    info.builder = builder;
    info.params_hash = p.hash();
    info.mode_a = m.a;
    info.mode_b = m.b;
    info.qubit = m.q;
    info.r = p.squeeze.r;
    info.theta = p.squeeze.theta;
    info.gamma = p.gamma;
    info.kappa_b = p.kappa_b;
    info.delta_q = p.delta_q;
    return info;
}

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

const char* to_string(Frame f)
{
    return f == Frame::Lab ? "lab" : "bogoliubov";
}

double delta_b_for(double delta_beta, double r)
{
    return delta_beta * std::cosh(2.0 * r);
}

void SystemParams::validate() const
{
    require_finite(delta_a, "delta_a");
    require_finite(delta_b, "delta_b");
    require_finite(delta_q, "delta_q");
    require_rate(kappa_a, "kappa_a");
    require_rate(kappa_b, "kappa_b");
    require_rate(kappa_i, "kappa_i");
    require_rate(gamma, "gamma");
    require_finite(g, "g");
    require_finite(E_a.real(), "E_a");
    require_finite(E_a.imag(), "E_a");
    squeeze.validate();
    if (trunc.size() == 0) fail(ErrorKind::InvalidArgument, "truncation layout is empty");

    if (squeeze.eta != 0.0 && std::abs(squeeze.eta - eta()) > 1e-12) {
        fail(ErrorKind::InvalidArgument, "squeeze.eta disagrees with kappa_i / kappa_b");
    }
    if (squeeze.r > 0.0 && delta_b < 0.0) {
        fail(ErrorKind::InvalidArgument, "delta_b must be non-negative when r > 0");
    }
    if (E_b != Complex(0.0)) {
        const double lam = std::abs(E_b) / delta_b;
        if (!(delta_b > 0.0) || lam >= 1.0) {
            fail(ErrorKind::Instability, "|E_b| must stay below delta_b");
        }
        const double r_b = squeeze::r_from_lambda(lam);
        if (std::abs(r_b - squeeze.r) > 1e-9 * std::max(1.0, squeeze.r)) {
            fail(ErrorKind::InvalidArgument, "E_b is inconsistent with squeeze.r");
        }
        const double ph = squeeze::wrap_phase(std::arg(E_b) + squeeze.theta);
        if (std::abs(ph) > squeeze::kPhaseTolerance) {
            fail(ErrorKind::PhaseMismatch, "arg(E_b) must equal -theta");
        }
    }
    if (squeeze.lambda_ratio != 0.0 &&
        std::abs(squeeze::r_from_lambda(squeeze.lambda_ratio) - squeeze.r) > 1e-9 * std::max(1.0, squeeze.r)) {
        fail(ErrorKind::InvalidArgument, "squeeze.lambda_ratio is inconsistent with squeeze.r");
    }
}

Complex SystemParams::effective_E_b() const
{
    if (E_b != Complex(0.0)) return E_b;
    return std::polar(delta_b * std::tanh(2.0 * squeeze.r), -squeeze.theta);
}

double SystemParams::delta_beta() const
{
    return delta_b / std::cosh(2.0 * squeeze.r);
}

std::string SystemParams::hash() const
{
    std::string text;
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g,", v);
        text += buf;
    };
    for (double v : {delta_a, delta_b, delta_q, E_a.real(), E_a.imag(), E_b.real(), E_b.imag(), kappa_a,
                     kappa_b, kappa_i, gamma, g, squeeze.r, squeeze.theta, squeeze.r_e, squeeze.theta_e,
                     squeeze.lambda_ratio, squeeze.eta}) {
        put(v);
    }
    for (const auto& s : trunc.subsystems()) {
        text += (s.kind == SubsystemKind::Qubit ? "q" : "f") + std::to_string(s.dim) + ",";
    }
    text += to_string(frame);
    text += include_h_err ? ",err" : ",noerr";
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

std::vector<Operator> gaussian_dissipator(const Operator& c, const Eigen::Matrix2cd& K)
{
    if ((K - K.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, K.cwiseAbs().maxCoeff())) {
        fail(ErrorKind::InvalidArgument, "gaussian_dissipator: K must be hermitian");
    }
    std::vector<Operator> out;
    const double scale = K.cwiseAbs().maxCoeff();
    if (scale == 0.0) return out;

    const Operator cd = c.adjoint();
    // Diagonal K: emit the channels directly so that simple cases stay exact.
    if (K(0, 1) == Complex(0.0)) {
        if (K(0, 0).real() > 0.0) out.push_back(c * std::sqrt(K(0, 0).real()));
        if (K(1, 1).real() > 0.0) out.push_back(cd * std::sqrt(K(1, 1).real()));
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(K);
    for (int k = 1; k >= 0; --k) {
        const double lam = es.eigenvalues()(k);
        if (lam < -1e-12 * scale) {
            fail(ErrorKind::InvalidArgument, "gaussian_dissipator: K is not positive semidefinite");
        }
        if (lam <= 1e-14 * scale) continue;
        const Eigen::Vector2cd u = es.eigenvectors().col(k);
        out.push_back((c * u(0) + cd * u(1)) * std::sqrt(lam));
    }
    return out;
}

LindbladModel to_lindblad(const slh::SLHTriple& g, const std::vector<Operator>& extra_collapse, Frame frame)
{
    slh::validate(g);
    LindbladModel model;
    model.layout = g.layout();
    model.H = g.H;
    model.collapse = g.L;
    for (const auto& op : extra_collapse) {
        require_same_layout(model.layout, op.layout(), "to_lindblad");
        model.collapse.push_back(op);
    }
    model.frame = frame;
    model.info.builder = "slh";
    return model;
}

LindbladModel build_ideal_bath(const SystemParams& params, bool matched)
{
    params.validate();
    const SpaceLayout& layout = params.trunc;
    const Modes m = resolve_modes(layout, 1, "build_ideal_bath");
    const auto& sq = params.squeeze;
    const double eta = params.eta();

    double r_e = sq.r_e;
    if (matched) {
        const double residual = squeeze::wrap_phase(sq.theta + sq.theta_e - kPi);
        if (std::abs(residual) >= squeeze::kPhaseTolerance) {
            fail(ErrorKind::PhaseMismatch, "build_ideal_bath: matched bath requires theta + theta_e = pi");
        }
        r_e = squeeze::matched_external_squeezing(sq.r, eta);
        if (sq.r_e != 0.0 && std::abs(sq.r_e - r_e) > 1e-9 * std::max(1.0, r_e)) {
            fail(ErrorKind::PhaseMismatch, "build_ideal_bath: r_e does not satisfy the matching condition");
        }
    }

    LindbladModel model;
    model.layout = layout;
    model.frame = params.frame;
    model.H = cavity_qubit_hamiltonian(params, layout, m);

    const Eigen::Matrix2cd K = bath_matrix(params.kappa_b, r_e, sq.theta_e, params.kappa_i);
    const Operator b = destroy(layout, static_cast<std::size_t>(m.b));
    if (params.frame == Frame::Lab) {
        model.collapse = gaussian_dissipator(b, K);
    } else if (matched && params.kappa_i == 0.0) {
        if (params.kappa_b > 0.0) model.collapse.push_back(b * std::sqrt(params.kappa_b));
    } else {
        const Eigen::Matrix2cd T = bogoliubov_T(sq.r, sq.theta);
        const Eigen::Matrix2cd Kb = T.transpose() * K * T.conjugate();
        model.collapse = gaussian_dissipator(b, 0.5 * (Kb + Kb.adjoint()));
    }
    append_qubit_decay(model.collapse, params, layout, m);
    model.info = make_info(matched ? "ideal_bath_matched" : "ideal_bath", params, m);
    return model;
}

LindbladModel build_fit_model(const SystemParams& params, double lambda_fit)
{
    if (!(lambda_fit >= 0.0 && lambda_fit <= 1.0)) {
        fail(ErrorKind::InvalidArgument, "build_fit_model: lambda_fit must lie in [0, 1]");
    }
    SystemParams p = params;
    p.frame = Frame::Bogoliubov;
    p.validate();
    const SpaceLayout& layout = p.trunc;
    const Modes m = resolve_modes(layout, 1, "build_fit_model");
    const double r = p.squeeze.r;
    const double c = std::cosh(r);
    const double s = std::sinh(r);
    const double kap = p.kappa_b;

    LindbladModel model;
    model.layout = layout;
    model.frame = Frame::Bogoliubov;
    model.H = cavity_qubit_hamiltonian(p, layout, m);

    Eigen::Matrix2cd K;
    K << Complex(kap * (1.0 + lambda_fit * s * s)), kap * lambda_fit * std::polar(c * s, p.squeeze.theta),
        kap * lambda_fit * std::polar(c * s, -p.squeeze.theta), Complex(kap * lambda_fit * s * s);
    if (p.kappa_i > 0.0) {
        const Eigen::Matrix2cd T = bogoliubov_T(r, p.squeeze.theta);
        const Eigen::Matrix2cd e1 = (Eigen::Matrix2cd() << 1.0, 0.0, 0.0, 0.0).finished();
        K += p.kappa_i * (T.transpose() * e1 * T.conjugate());
    }
    model.collapse = gaussian_dissipator(destroy(layout, static_cast<std::size_t>(m.b)), K);
    append_qubit_decay(model.collapse, p, layout, m);
    model.info = make_info("fit", p, m);
    return model;
}

slh::SLHTriple cascade_source_triple(const SystemParams& params, const SpaceLayout& layout)
{
    const Operator a = destroy(layout, 0);
    const Operator ad = a.adjoint();
    const Complex i(0.0, 1.0);
    Operator H = number(layout, 0) * params.delta_a;
    H += (ad * ad * params.E_a - a * a * std::conj(params.E_a)) * i;
    return slh::make_triple(a * std::sqrt(params.kappa_a), H);
}

LindbladModel build_cascade(const SystemParams& params)
{
    params.validate();
    const SpaceLayout& layout = params.trunc;
    const Modes m = resolve_modes(layout, 2, "build_cascade");
    squeeze::opo_rates(params.kappa_a + params.kappa_i, std::abs(params.E_a));

    const double r = params.squeeze.r;
    const double theta = params.squeeze.theta;
    const Operator b_expr = params.frame == Frame::Lab ? destroy(layout, static_cast<std::size_t>(m.b))
                                                       : bogoliubov_b(layout, m.b, r, theta);

    const slh::SLHTriple g1 = cascade_source_triple(params, layout);
    const slh::SLHTriple g2 =
        slh::make_triple(b_expr * std::sqrt(params.kappa_b), cavity_qubit_hamiltonian(params, layout, m));
    const slh::SLHTriple g = slh::series_product(g1, g2);

    std::vector<Operator> extra;
    if (params.kappa_i > 0.0) {
        extra.push_back(destroy(layout, 0) * std::sqrt(params.kappa_i));
        extra.push_back(b_expr * std::sqrt(params.kappa_i));
    }
    append_qubit_decay(extra, params, layout, m);

    LindbladModel model = to_lindblad(g, extra, params.frame);
    model.info = make_info("cascade", params, m);
    return model;
}

Operator lab_b(const LindbladModel& model)
{
    if (model.info.mode_b < 0) fail(ErrorKind::InvalidArgument, "lab_b: model has no b mode");
    if (model.frame == Frame::Lab) return destroy(model.layout, static_cast<std::size_t>(model.info.mode_b));
    return bogoliubov_b(model.layout, model.info.mode_b, model.info.r, model.info.theta);
}

LabObservables lab_frame_observables(const LindbladModel& model)
{
    const Operator b = lab_b(model);
    LabObservables out{b.adjoint() * b, std::nullopt};
    if (model.info.qubit >= 0) {
        const QubitOps q = qubit_ops(model.layout, static_cast<std::size_t>(model.info.qubit));
        out.qubit_excitation = q.sigma_plus * q.sigma_minus;
    }
    return out;
}

} // namespace cqed
