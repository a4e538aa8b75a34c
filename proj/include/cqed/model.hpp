// model.hpp - parameter record and Lindblad model builders
//
// Subsystem order is fixed per builder:
//   ideal bath / fit model:  (b [, qubit])
//   cascade:                 (a, b [, qubit])
// A qubit is present iff the truncation layout lists one.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqed/hilbert.hpp"
#include "cqed/slh.hpp"
#include "cqed/squeeze.hpp"

namespace cqed {

enum class Frame { Lab, Bogoliubov };

const char* to_string(Frame f);

struct SystemParams {
    double delta_a{0.0};
    double delta_b{1.0};   // lab-frame detuning of b; the Bogoliubov mode sits at delta_b / cosh 2r
    double delta_q{1.0};
    Complex E_a{0.0};      // source drive, H = i(E_a a^dag^2 - E_a^* a^2)
    Complex E_b{0.0};      // b drive, H = -1/2 (E_b b^dag^2 + h.c.); zero means "derive from squeeze.r"
    double kappa_a{0.0};
    double kappa_b{0.015};
    double kappa_i{0.0};
    double gamma{0.001};
    double g{0.003};
    squeeze::SqueezeParams squeeze;
    SpaceLayout trunc;
    Frame frame{Frame::Bogoliubov};
    bool include_h_err{true};

    void validate() const;
    double eta() const { return kappa_b > 0.0 ? kappa_i / kappa_b : 0.0; }
    // Intracavity drive consistent with squeeze.r and squeeze.theta.
    Complex effective_E_b() const;
    double delta_beta() const;
    // Stable FNV-1a hash over every field (17-digit text form).
    std::string hash() const;
};

// delta_b that places the Bogoliubov mode of squeezing r at delta_beta.
double delta_b_for(double delta_beta, double r);

struct ModelInfo {
    std::string builder;
    std::string params_hash;
    int mode_a{-1};
    int mode_b{-1};
    int qubit{-1};
    double r{0.0};
    double theta{0.0};
    double gamma{0.0};
    double kappa_b{0.0};
    double delta_q{0.0};
};

struct LindbladModel {
    SpaceLayout layout;
    Operator H;
    std::vector<Operator> collapse;
    Frame frame{Frame::Lab};
    ModelInfo info;

    Superoperator liouvillian() const { return cqed::liouvillian(H, collapse); }
};

LindbladModel build_ideal_bath(const SystemParams& params, bool matched);
LindbladModel build_cascade(const SystemParams& params);
LindbladModel build_fit_model(const SystemParams& params, double lambda_fit);

slh::SLHTriple cascade_source_triple(const SystemParams& params, const SpaceLayout& layout);
LindbladModel to_lindblad(const slh::SLHTriple& g, const std::vector<Operator>& extra_collapse,
                          Frame frame = Frame::Lab);

struct LabObservables {
    Operator photon_number_b;
    std::optional<Operator> qubit_excitation;
};
// Lab-frame b^dag b (through the inverse transform in the Bogoliubov frame) and sigma_+ sigma_-.
LabObservables lab_frame_observables(const LindbladModel& model);

// Lab-frame b in terms of the model's own mode operator.
Operator lab_b(const LindbladModel& model);

// Splits a Gaussian dissipator sum_ij K_ij F_i rho F_j^dag over F = (c, c^dag)
// into at most two collapse operators. K must be hermitian positive semidefinite.
std::vector<Operator> gaussian_dissipator(const Operator& c, const Eigen::Matrix2cd& K);

} // namespace cqed
