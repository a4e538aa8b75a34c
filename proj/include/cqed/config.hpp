// config.hpp - scenario configuration files
//
// Grammar (one statement per line):
//
//   line     := blank | comment | section | entry
//   comment  := '#' ...            (also allowed after a value)
//   section  := '[' name ']'       name in {params, sweep, run, analysis}
//   entry    := key '=' value
//
// Entries before the first section belong to the top level. Lists are
// comma separated. docs/config.md lists every key with its default.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/model.hpp"

namespace cqed {

enum class ModelKind { Ideal, Cascade, Fit };
enum class OutputKind { Spectrum, Dynamics, Steady, Fit };
enum class Reference { None, Ideal, Vacuum };
enum class InitialState { Excited, Ground, Steady };

const char* to_string(ModelKind kind);
const char* to_string(OutputKind kind);

struct Sweep {
    std::string axis;             // any [params] key
    std::vector<double> values;
};

struct RunControls {
    double tf_multiplier{40.0};
    double omega_min{0.9};
    double omega_max{1.1};
    std::size_t omega_points{2001};
    double dt{0.0};                 // 0: derived from omega_max
    double window_tol{1e-4};
    double krylov_tol{1e-4};
    std::size_t krylov_max_dim{800};
    double t_max{3000.0};
    std::size_t t_points{301};
    InitialState initial{InitialState::Excited};
    double rtol{1e-9};
    double atol{1e-11};
    bool adaptive_truncation{false};
    std::size_t truncation_cap{40};
    double truncation_tol{0.01};
    double fit_step{0.05};
    bool paper_scale{false};        // refuses to run without --paper-scale
};

struct AnalysisControls {
    bool splitting{false};          // two-peak splitting of every spectrum
    bool linewidth{false};          // linewidth relative to the reference spectrum
    Reference reference{Reference::None};
    double min_prominence{0.05};
};

struct ScenarioConfig {
    std::string name{"scenario"};
    ModelKind model{ModelKind::Ideal};
    std::vector<OutputKind> outputs;
    std::map<std::string, double> params;   // every known key, defaults filled
    Frame frame{Frame::Bogoliubov};
    std::optional<Sweep> sweep;
    RunControls run;
    AnalysisControls analysis;
    std::string source;                       // text the config was parsed from

    // FNV-1a of the source text, as recorded in manifests.
    std::string hash() const;
};

// Throws ConfigSyntax (with the line number) or ConfigValidation (naming the key).
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

// Physical parameters for one run; `sweep_value` replaces the sweep axis key.
// Derived keys are resolved in this order: squeeze_db -> r, kappa_ratio ->
// kappa_a, ea_frac or source_matched -> E_a, match_source -> r (from the
// steady photon number the source produces), delta_beta -> delta_b,
// theta_e (NaN) -> pi - theta.
SystemParams resolve_params(const ScenarioConfig& config, std::optional<double> sweep_value = std::nullopt);

// Names of all [params] keys in declaration order.
const std::vector<std::string>& param_keys();

} // namespace cqed
