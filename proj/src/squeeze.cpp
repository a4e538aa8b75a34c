// squeeze.cpp - closed-form squeezing relations

#include "cqed/squeeze.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cqed::squeeze {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonnegative(double value, const char* name)
{
    if (!(value >= 0.0) || !std::isfinite(value)) {
        fail(ErrorKind::InvalidArgument, std::string(name) + " must be finite and non-negative");
    }
}

// Source oscillator: 4|E| / kappa must stay below 1 by the guard margin.
void require_below_threshold(double kappa, double E_mag, const char* context)
{
    require_nonnegative(kappa, "kappa");
    require_nonnegative(E_mag, "|E|");
    if (kappa <= 0.0 || 4.0 * E_mag >= kappa * (1.0 - kThresholdMargin)) {
        fail(ErrorKind::Threshold, std::string(context) + ": drive |E| = " + std::to_string(E_mag) +
                                       " is at or above threshold kappa/4 = " +
                                       std::to_string(kappa / 4.0));
    }
}

} // namespace

void SqueezeParams::validate() const
{
    if (std::abs(lambda_ratio) >= 1.0) {
        fail(ErrorKind::Instability, "SqueezeParams: |lambda_ratio| must be < 1");
    }
    require_nonnegative(r, "r");
    require_nonnegative(r_e, "r_e");
    require_nonnegative(eta, "eta");
}

double wrap_phase(double phase)
{
    double w = std::remainder(phase, 2.0 * kPi);  // [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

double r_from_lambda(double lambda_ratio)
{
    if (!(std::abs(lambda_ratio) < 1.0)) {
        fail(ErrorKind::Instability, "r_from_lambda: |E/delta| must be < 1 for a stable oscillator");
    }
    return 0.25 * std::log((1.0 + lambda_ratio) / (1.0 - lambda_ratio));
}

double lambda_from_r(double r)
{
    require_nonnegative(r, "r");
    return std::tanh(2.0 * r);
}

double db_to_r(double db)
{
    require_nonnegative(db, "dB");
    return db * std::log(10.0) / 20.0;
}

double r_to_db(double r)
{
    require_nonnegative(r, "r");
    return 20.0 * r / std::log(10.0);
}

std::pair<Operator, Operator> bogoliubov_pair(const Operator& a, const Operator& a_dag, double r,
                                              BogoliubovSign sign)
{
    require_same_layout(a.layout(), a_dag.layout(), "bogoliubov_pair");
    const double c = std::cosh(r);
    const double s = (sign == BogoliubovSign::Plus ? 1.0 : -1.0) * std::sinh(r);
    Operator alpha = a * c + a_dag * s;
    Operator alpha_dag = a_dag * c + a * s;
    return {std::move(alpha), std::move(alpha_dag)};
}

BathCoeffs bath_NM(double r_e, double theta_e)
{
    require_nonnegative(r_e, "r_e");
    const double s = std::sinh(r_e);
    const double c = std::cosh(r_e);
    return BathCoeffs{s * s, std::polar(s * c, theta_e)};
}

OpoRates opo_rates(double kappa_a, double E_a_mag)
{
    require_below_threshold(kappa_a, E_a_mag, "opo_rates");
    return OpoRates{kappa_a / 2.0 + 2.0 * E_a_mag, kappa_a / 2.0 - 2.0 * E_a_mag};
}

BathCoeffs markovian_bath_coeffs(double kappa_a, Complex E_a)
{
    const double e = std::abs(E_a);
    const OpoRates rates = opo_rates(kappa_a, e);
    const double l2 = rates.fast * rates.fast;
    const double m2 = rates.slow * rates.slow;
    const double denom = 4.0 * l2 * m2;
    const double n_s = (l2 - m2) * (l2 - m2) / denom;
    const double m_s = (l2 * l2 - m2 * m2) / denom;
    const double phase = e > 0.0 ? 2.0 * std::arg(E_a) : 0.0;
    return BathCoeffs{n_s, std::polar(m_s, phase)};
}

OutputCorrelations output_correlations(double kappa_a, double E_a_mag, double tau)
{
    require_nonnegative(tau, "tau");
    const OpoRates rates = opo_rates(kappa_a, E_a_mag);
    const double lam = rates.fast;
    const double mu = rates.slow;
    const double pre = (lam * lam - mu * mu) / 8.0;
    const double slow_term = std::exp(-mu * tau) / mu;
    const double fast_term = std::exp(-lam * tau) / lam;
    return OutputCorrelations{pre * (slow_term - fast_term), pre * (slow_term + fast_term)};
}

double source_drive_fraction_for(double r)
{
    require_nonnegative(r, "r");
    // sqrt(N) = 2x / (1 - x^2) with x = 4|E|/kappa  =>  x = tanh(r / 2)
    return std::tanh(0.5 * r) / 4.0;
}

double matched_external_squeezing(double r, double eta)
{
    require_nonnegative(r, "r");
    require_nonnegative(eta, "eta");
    return r + 0.5 * std::asinh(eta * std::sinh(2.0 * r));
}

double effective_thermal_occupation(double r, double eta)
{
    require_nonnegative(r, "r");
    require_nonnegative(eta, "eta");
    if (r == 0.0 || eta == 0.0) return 0.0;
    const double s = std::sinh(r);
    const double s2r = std::sinh(2.0 * r);
    const double x = eta * s2r;
    // sqrt(1 + x^2) - 1 written to avoid cancellation for small x
    const double root_minus_one = x * x / (std::sqrt(1.0 + x * x) + 1.0);
    return 0.5 * (2.0 * eta * s * s + root_minus_one);
}

double steady_state_photon_lossless(double kappa_a, double kappa_b, double E_a_mag)
{
    require_below_threshold(kappa_a, E_a_mag, "steady_state_photon_lossless");
    require_nonnegative(kappa_b, "kappa_b");
    const double e2 = E_a_mag * E_a_mag;
    const double first = kappa_a * kappa_a / 4.0 - 4.0 * e2;
    const double second = first + kappa_a * kappa_b / 2.0 + kappa_b * kappa_b / 4.0;
    return 2.0 * kappa_a * e2 * (2.0 * kappa_a + kappa_b) / (first * second);
}

double steady_state_photon_lossy(double kappa_a, double kappa_b, double kappa_i, double E_a_mag)
{
    require_nonnegative(kappa_i, "kappa_i");
    require_nonnegative(kappa_b, "kappa_b");
    require_below_threshold(kappa_a + kappa_i, E_a_mag, "steady_state_photon_lossy");
    if (kappa_b + kappa_i <= 0.0) {
        fail(ErrorKind::InvalidArgument, "steady_state_photon_lossy: kappa_b + kappa_i must be positive");
    }
    const double e2 = E_a_mag * E_a_mag;
    const double sa = kappa_a + kappa_i;
    const double sab = kappa_a + kappa_b + 2.0 * kappa_i;
    const double num = 2.0 * e2 * kappa_a * kappa_b * (2.0 * kappa_a + kappa_b + 3.0 * kappa_i);
    const double den = (kappa_b + kappa_i) * (sa * sa / 4.0 - 4.0 * e2) * (sab * sab / 4.0 - 4.0 * e2);
    return num / den;
}

IntracavityDrive matched_intracavity_drive(double n_b_ss, double delta_b)
{
    require_nonnegative(n_b_ss, "N_b_ss");
    const double r = std::asinh(std::sqrt(n_b_ss));
    return IntracavityDrive{r, delta_b * std::tanh(2.0 * r)};
}

PhaseMatch phase_match_check(double theta, double theta_e, double r, double r_e, double eta,
                             double tol)
{
    require_nonnegative(r, "r");
    require_nonnegative(r_e, "r_e");
    require_nonnegative(eta, "eta");
    PhaseMatch out;
    out.phase_residual = wrap_phase(theta + theta_e - kPi);
    out.matched = std::abs(out.phase_residual) < tol;

    const double c = std::cosh(r);
    const double s = std::sinh(r);
    const double ce = std::cosh(r_e);
    const double se = std::sinh(r_e);
    const double n_s = se * se;
    const Complex m_s = std::polar(ce * se, -theta_e);
    const Complex e_th = std::polar(1.0, theta);

    out.thermal = s * s * (1.0 + eta) + n_s * (c * c + s * s) +
                  c * s * 2.0 * std::real(m_s * std::conj(e_th));
    out.two_photon = c * s * e_th * (2.0 * n_s + 1.0 + eta) + m_s * c * c +
                     std::conj(m_s) * e_th * e_th * s * s;
    return out;
}

} // namespace cqed::squeeze
