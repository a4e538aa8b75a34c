// evolve.hpp - steady states, time evolution, two-time correlations and absorption spectra

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cqed/model.hpp"
#include "cqed/propagator.hpp"

namespace cqed {

struct SteadyStateOptions {
    bool force_iterative{false};
    double residual_tol{1e-10};      // relative to ||L||_F
    double rcond_min{1e-14};
    int max_iterations{2000};
    double iterative_tol{1e-13};
    std::size_t iterative_threshold{4'000'000};  // dim(L) above which GMRES is used
};

struct SteadyStateResult {
    DensityState state;          // hermitized, unit trace, positivity-clipped (for reporting)
    DenseMatrix raw;             // hermitized, unit trace, unclipped (for propagation)
    double residual{0.0};        // ||L vec(raw)|| / ||L||_F
    double clipped_mass{0.0};
    double rcond{0.0};
    std::string method;          // "direct" or "gmres"
    int iterations{0};
};

SteadyStateResult solve_steady_state(const LindbladModel& model, const SteadyStateOptions& opts = {});
DensityState steady_state(const LindbladModel& model);

struct TimeSeries {
    std::vector<double> times;
    std::vector<std::string> labels;
    std::vector<std::vector<Complex>> values;  // values[observable][time]
    double trace_drift{0.0};
    double hermiticity_drift{0.0};
};

struct EvolveOptions {
    double rtol{1e-9};
    double atol{1e-11};
    std::size_t max_steps{2'000'000};  // between two requested output times
};

TimeSeries evolve_expectations(const LindbladModel& model, const DensityState& rho0,
                               const std::vector<double>& times, const std::vector<Operator>& observables,
                               const std::vector<std::string>& labels = {}, const EvolveOptions& opts = {});

// C(tau) = Tr[A e^{L tau}(B rho_ss)] for tau >= 0.
std::vector<Complex> two_time_correlation(const LindbladModel& model, const Operator& A, const Operator& B,
                                          const std::vector<double>& taus, const ReducedOptions& opts = {},
                                          ReducedDiagnostics* diag = nullptr);

struct SpectrumOptions {
    double tf_multiplier{40.0};      // t_f = tf_multiplier / gamma
    double min_tf_multiplier{20.0};
    std::size_t padding{4};
    double dt{0.0};                  // 0: pi / (2 omega_max)
    double window_tol{1e-4};
    ReducedOptions reduced;
};

struct Spectrum {
    std::vector<double> omegas;
    std::vector<double> values;
    std::string params_hash;
    double t_f{0.0};
    double dt{0.0};
    std::size_t samples{0};
    std::size_t basis_dim{0};
    std::string method;
    double trace_drift{0.0};
    double tail_ratio{0.0};          // max |C| over the last 5% of the window / |C(0)|
    double steady_residual{0.0};
    double clipped_mass{0.0};
};

// S(omega) = 2 Re int_0^{t_f} e^{i omega tau} <sigma_-(tau) sigma_+(0)> d tau, lines at +delta_q.
Spectrum absorption_spectrum(const LindbladModel& model, const std::vector<double>& omega_grid,
                             const SpectrumOptions& opts = {});

// One-sided transform of uniformly sampled C(k dt), interpolated onto omega_grid.
std::vector<double> one_sided_spectrum(const std::vector<Complex>& corr, double dt,
                                       const std::vector<double>& omega_grid, std::size_t padding = 4);

struct TruncationStep {
    SpaceLayout layout;
    double value{0.0};
};

struct TruncationResult {
    SpaceLayout layout;
    double value{0.0};
    std::vector<TruncationStep> trace;
};

using ModelBuilder = std::function<LindbladModel(const SpaceLayout&)>;
using SteadyObservable = std::function<double(const LindbladModel&, const DensityState&)>;

// Grows every fock dimension by `step` until the observable changes by less than
// rel_tol between successive truncations; throws TruncationInsufficient at the cap.
TruncationResult adaptive_truncation_check(const ModelBuilder& builder, const SteadyObservable& observable,
                                           const SpaceLayout& start, std::size_t cap = 40,
                                           double rel_tol = 0.01, std::size_t step = 2);

} // namespace cqed
