// squeeze.hpp - closed-form squeezing relations: Bogoliubov transforms, bath
// coefficients, matching conditions and steady-state photon numbers.
//
// Drive conventions used throughout:
//   * a detuned parametric cavity  H = delta b^dag b - 1/2 (E b^dag^2 + E^* b^2)
//     is diagonalized by beta = cosh(r) b - e^{-i theta} sinh(r) b^dag with
//     tanh(2r) = |E|/delta, so lambda_ratio = E/delta maps to r exactly;
//   * the resonant source oscillator H = i(E a^dag^2 - E^* a^2) with decay kappa
//     has quadrature rates kappa/2 +- 2|E| and threshold |E| = kappa/4.

#pragma once

#include <complex>
#include <utility>

#include "cqed/hilbert.hpp"

namespace cqed::squeeze {

struct SqueezeParams {
    double r{0.0};            // intracavity squeezing
    double theta{0.0};        // intracavity squeezing phase
    double r_e{0.0};          // reservoir squeezing
    double theta_e{0.0};      // reservoir phase
    double lambda_ratio{0.0}; // E / delta of the intracavity drive
    double eta{0.0};          // kappa_i / kappa

    void validate() const;
};

struct BathCoeffs {
    double N{0.0};
    Complex M{0.0};
};

// Phases are reported in (-pi, pi].
double wrap_phase(double phase);

double r_from_lambda(double lambda_ratio);
double lambda_from_r(double r);
double db_to_r(double db);
double r_to_db(double r);

enum class BogoliubovSign { Plus, Minus };

// Plus:  alpha = a cosh r + a^dag sinh r
// Minus: beta  = a cosh r - a^dag sinh r
std::pair<Operator, Operator> bogoliubov_pair(const Operator& a, const Operator& a_dag, double r,
                                              BogoliubovSign sign);

// N = sinh^2 r_e, M = e^{i theta_e} sinh r_e cosh r_e.
BathCoeffs bath_NM(double r_e, double theta_e);

// Quadrature decay rates of the source oscillator: kappa/2 + 2|E| and kappa/2 - 2|E|.
struct OpoRates {
    double fast{0.0};
    double slow{0.0};
};
OpoRates opo_rates(double kappa_a, double E_a_mag);

// Markovian limit of the source output correlations; M carries phase e^{2i arg E_a}.
BathCoeffs markovian_bath_coeffs(double kappa_a, Complex E_a);

struct OutputCorrelations {
    double normal{0.0};     // <a_out^dag(t) a_out(t + tau)>
    double anomalous{0.0};  // <a_out(t) a_out(t + tau)>
};
OutputCorrelations output_correlations(double kappa_a, double E_a_mag, double tau);

// Drive fraction |E_a|/kappa_a whose Markovian output occupation equals sinh^2(r).
double source_drive_fraction_for(double r);

double matched_external_squeezing(double r, double eta);
double effective_thermal_occupation(double r, double eta);

double steady_state_photon_lossless(double kappa_a, double kappa_b, double E_a_mag);
double steady_state_photon_lossy(double kappa_a, double kappa_b, double kappa_i, double E_a_mag);

struct IntracavityDrive {
    double r{0.0};
    double E_b{0.0};
};
// r = asinh(sqrt(N)), E_b = delta_b tanh(2r).
IntracavityDrive matched_intracavity_drive(double n_b_ss, double delta_b);

struct PhaseMatch {
    bool matched{false};
    double phase_residual{0.0};  // theta + theta_e - pi, wrapped
    double thermal{0.0};         // squeezed-frame thermal coefficient
    Complex two_photon{0.0};     // squeezed-frame two-photon coefficient
};

// Residual squeezed-frame noise for the intracavity mode (r, theta) coupled to a
// bath (r_e, theta_e) with relative intrinsic loss eta.
PhaseMatch phase_match_check(double theta, double theta_e, double r = 0.0, double r_e = 0.0,
                             double eta = 0.0, double tol = 1e-9);

inline constexpr double kPhaseTolerance = 1e-9;
inline constexpr double kThresholdMargin = 1e-9;

} // namespace cqed::squeeze
