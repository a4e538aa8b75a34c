// scenario.hpp - run a scenario config: build, solve, analyze, emit CSV and a manifest

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cqed/config.hpp"
#include "cqed/evolve.hpp"
#include "cqed/spectro.hpp"

namespace cqed {

enum class ExitCode : int { Success = 0, ConfigError = 2, SolverError = 3, AnalysisError = 4 };

// Config kinds map to 2, peak-analysis kinds to 4, everything else to 3.
ExitCode exit_code_for(ErrorKind kind);

struct RunOptions {
    std::filesystem::path out_dir{"."};
    std::size_t workers{1};
    bool paper_scale{false};
    std::optional<OutputKind> only;   // restrict to one output kind
    std::string command{"sweep"};     // recorded in the manifest
};

struct Failure {
    std::string stage;
    ErrorKind kind{ErrorKind::Convergence};
    std::string message;
};

struct SteadySummary {
    double n_b{0.0};        // lab-frame photon number of the b cavity
    double n_mode{0.0};     // photon number of the model's own mode (beta in the Bogoliubov frame)
    double n_a{0.0};        // source cavity, NaN without one
    double sigma_ee{0.0};   // NaN without a qubit
    double residual{0.0};
    double clipped_mass{0.0};
    std::string layout;     // final truncation, e.g. "f10,f12,q2"
};

struct PeakSummary {
    std::size_t count{0};
    double splitting{0.0};              // NaN when unavailable
    double fwhm{0.0};                   // of the tallest peak
    double normalized_linewidth{0.0};   // NaN without a reference
};

struct PointResult {
    std::optional<double> sweep_value;
    std::string params_hash;
    std::optional<Spectrum> spectrum;
    std::optional<Spectrum> reference;
    std::optional<PeakSummary> peaks;
    std::optional<TimeSeries> dynamics;
    std::optional<SteadySummary> steady;
    std::optional<FitResult> fit;
    std::optional<Failure> failure;            // solver failure, stops the point
    std::vector<Failure> analysis_failures;    // the point's numbers are still kept
};

struct RunArtifact {
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest;
    std::vector<PointResult> points;
    ExitCode exit_code{ExitCode::Success};
};

// Evaluates one point (no files written).
PointResult run_point(const ScenarioConfig& config, const std::vector<OutputKind>& outputs,
                      std::optional<double> sweep_value, std::size_t inner_workers = 1);

// Runs every sweep point (or the single point) and writes
// <out>/<scenario>_<output>.csv plus <out>/<scenario>_manifest.json.
RunArtifact run(const ScenarioConfig& config, const RunOptions& options);

// Workers from the CQED_WORKERS environment variable, or 1.
std::size_t default_workers();

std::string format_double(double v);

} // namespace cqed
