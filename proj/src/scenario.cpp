// scenario.cpp - scenario pipeline and artifact emission

#include "cqed/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>

#include "json.hpp"

#include "cqed/parallel.hpp"

namespace cqed {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool wants(const std::vector<OutputKind>& outputs, OutputKind kind)
{
    return std::find(outputs.begin(), outputs.end(), kind) != outputs.end();
}

std::vector<double> omega_grid(const RunControls& run)
{
    std::vector<double> out(run.omega_points);
    const double step = (run.omega_max - run.omega_min) / static_cast<double>(run.omega_points - 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = run.omega_min + step * static_cast<double>(i);
    return out;
}

SpectrumOptions spectrum_options(const RunControls& run)
{
    SpectrumOptions o;
    o.tf_multiplier = run.tf_multiplier;
    o.dt = run.dt;
    o.window_tol = run.window_tol;
    o.reduced.tol = run.krylov_tol;
    o.reduced.max_dim = run.krylov_max_dim;
    return o;
}

LindbladModel build_model(const ScenarioConfig& config, const SystemParams& p)
{
    switch (config.model) {
    case ModelKind::Ideal: return build_ideal_bath(p, config.params.at("matched") != 0.0);
    case ModelKind::Cascade: return build_cascade(p);
    case ModelKind::Fit: return build_fit_model(p, config.params.at("lambda"));
    }
    fail(ErrorKind::InvalidArgument, "unknown model kind");
}

// The same cavity and qubit without the source mode.
SystemParams single_cavity(const SystemParams& p)
{
    SystemParams out = p;
    std::vector<Subsystem> dims;
    for (const auto& s : p.trunc.subsystems()) dims.push_back(s);
    if (dims.size() == 3) dims.erase(dims.begin());
    out.trunc = make_space(dims);
    out.kappa_a = 0.0;
    out.E_a = 0.0;
    return out;
}

SystemParams reference_params(const SystemParams& p, Reference ref)
{
    SystemParams out = single_cavity(p);
    out.squeeze.theta_e = std::numbers::pi - out.squeeze.theta;
    out.squeeze.r_e = 0.0;
    if (ref == Reference::Vacuum) {
        out.delta_b = p.delta_beta();
        out.squeeze = {};
        out.squeeze.theta_e = std::numbers::pi;
        out.E_b = 0.0;
    }
    return out;
}

std::string layout_text(const SpaceLayout& layout)
{
    std::string out;
    for (const auto& s : layout.subsystems()) {
        if (!out.empty()) out += ",";
        out += (s.kind == SubsystemKind::Qubit ? "q" : "f") + std::to_string(s.dim);
    }
    return out;
}

SteadySummary summarize_steady(const LindbladModel& model, const SteadyStateResult& ss)
{
    SteadySummary out;
    const LabObservables obs = lab_frame_observables(model);
    out.n_b = expect(obs.photon_number_b, ss.state).real();
    out.n_mode = expect(number(model.layout, static_cast<std::size_t>(model.info.mode_b)), ss.state).real();
    out.n_a = model.info.mode_a >= 0
                  ? expect(number(model.layout, static_cast<std::size_t>(model.info.mode_a)), ss.state).real()
                  : kNaN;
    out.sigma_ee = obs.qubit_excitation ? expect(*obs.qubit_excitation, ss.state).real() : kNaN;
    out.residual = ss.residual;
    out.clipped_mass = ss.clipped_mass;
    out.layout = layout_text(model.layout);
    return out;
}

DensityState initial_state(const LindbladModel& model, InitialState which)
{
    if (which == InitialState::Steady) return steady_state(model);
    std::vector<std::size_t> levels(model.layout.size(), 0);
    if (model.info.qubit >= 0 && which == InitialState::Ground) levels[static_cast<std::size_t>(model.info.qubit)] = 1;
    return basis_state(model.layout, levels);
}

PeakSummary analyze_peaks(const ScenarioConfig& config, PointResult& point)
{
    PeakSummary out{0, kNaN, kNaN, kNaN};
    const double prom = config.analysis.min_prominence;
    try {
        const PeakSet set = find_peaks(*point.spectrum, prom);
        out.count = set.peaks.size();
        const auto tallest = std::max_element(set.peaks.begin(), set.peaks.end(),
                                              [](const Peak& a, const Peak& b) { return a.height < b.height; });
        out.fwhm = tallest->fwhm;
        if (config.analysis.splitting) out.splitting = splitting(set);
    } catch (const Error& e) {
        point.analysis_failures.push_back({"splitting", e.kind(), e.what()});
    }
    if (config.analysis.linewidth && point.reference) {
        try {
            out.normalized_linewidth = normalized_linewidth(*point.spectrum, *point.reference, prom);
        } catch (const Error& e) {
            point.analysis_failures.push_back({"linewidth", e.kind(), e.what()});
        }
    }
    return out;
}

std::vector<double> fit_grid(double step)
{
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::llround(1.0 / step));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(std::min(1.0, step * static_cast<double>(i)));
    if (out.back() < 1.0) out.push_back(1.0);
    return out;
}

json spectrum_json(const Spectrum& s)
{
    return {{"params_hash", s.params_hash}, {"method", s.method},         {"basis_dim", s.basis_dim},
            {"t_f", s.t_f},                 {"dt", s.dt},                 {"samples", s.samples},
            {"trace_drift", s.trace_drift}, {"tail_ratio", s.tail_ratio}, {"steady_residual", s.steady_residual},
            {"clipped_mass", s.clipped_mass}};
}

json failure_json(const Failure& f)
{
    return {{"stage", f.stage}, {"kind", std::string(to_string(f.kind))}, {"message", f.message}};
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

class CsvWriter {
public:
    explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary)
    {
        if (!out_) fail(ErrorKind::ConfigValidation, "cannot write '" + path.string() + "'");
    }

    void header(const std::vector<std::string>& cols)
    {
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values)
    {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

} // namespace

ExitCode exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::ConfigSyntax:
    case ErrorKind::ConfigValidation: return ExitCode::ConfigError;
    case ErrorKind::NoPeaks:
    case ErrorKind::InsufficientPeaks:
    case ErrorKind::MultiPeak: return ExitCode::AnalysisError;
    default: return ExitCode::SolverError;
    }
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::size_t default_workers()
{
    if (const char* env = std::getenv("CQED_WORKERS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
        std::cerr << "warning: ignoring CQED_WORKERS='" << env << "'\n";
    }
    return 1;
}

PointResult run_point(const ScenarioConfig& config, const std::vector<OutputKind>& outputs,
                      std::optional<double> sweep_value, std::size_t inner_workers)
{
    PointResult point;
    point.sweep_value = sweep_value;
    std::string stage = "params";
    try {
        const SystemParams p = resolve_params(config, sweep_value);
        p.validate();
        point.params_hash = p.hash();

        stage = "build";
        LindbladModel model = build_model(config, p);

        if (wants(outputs, OutputKind::Steady)) {
            stage = "steady";
            if (config.run.adaptive_truncation) {
                const ModelBuilder builder = [&](const SpaceLayout& layout) {
                    SystemParams q = p;
                    q.trunc = layout;
                    return build_model(config, q);
                };
                const SteadyObservable n_b = [](const LindbladModel& m, const DensityState& rho) {
                    return expect(lab_frame_observables(m).photon_number_b, rho).real();
                };
                const TruncationResult tr = adaptive_truncation_check(builder, n_b, p.trunc, config.run.truncation_cap,
                                                                      config.run.truncation_tol);
                SystemParams q = p;
                q.trunc = tr.layout;
                model = build_model(config, q);
            }
            point.steady = summarize_steady(model, solve_steady_state(model));
        }

        const bool need_spectrum = wants(outputs, OutputKind::Spectrum) || wants(outputs, OutputKind::Fit);
        if (need_spectrum) {
            stage = "spectrum";
            const std::vector<double> grid = omega_grid(config.run);
            const SpectrumOptions opts = spectrum_options(config.run);
            point.spectrum = absorption_spectrum(model, grid, opts);
            if (config.analysis.reference != Reference::None) {
                stage = "reference";
                const LindbladModel ref = build_ideal_bath(reference_params(p, config.analysis.reference), true);
                point.reference = absorption_spectrum(ref, grid, opts);
            }
            if (config.analysis.splitting || config.analysis.linewidth) {
                stage = "analysis";
                point.peaks = analyze_peaks(config, point);
            }
        }

        if (wants(outputs, OutputKind::Dynamics)) {
            stage = "dynamics";
            const DensityState rho0 = initial_state(model, config.run.initial);
            std::vector<double> times(config.run.t_points);
            for (std::size_t i = 0; i < times.size(); ++i) {
                times[i] = config.run.t_max * static_cast<double>(i) / static_cast<double>(times.size() - 1);
            }
            const LabObservables obs = lab_frame_observables(model);
            std::vector<Operator> ops;
            std::vector<std::string> labels;
            if (obs.qubit_excitation) {
                ops.push_back(*obs.qubit_excitation);
                labels.emplace_back("sigma_ee");
            }
            ops.push_back(obs.photon_number_b);
            labels.emplace_back("n_b");
            EvolveOptions eo;
            eo.rtol = config.run.rtol;
            eo.atol = config.run.atol;
            point.dynamics = evolve_expectations(model, rho0, times, ops, labels, eo);
        }

        if (wants(outputs, OutputKind::Fit)) {
            stage = "fit";
            point.fit = fit_lambda(*point.spectrum, single_cavity(p), fit_grid(config.run.fit_step),
                                   spectrum_options(config.run), inner_workers);
        }
    } catch (const Error& e) {
        point.failure = Failure{stage, e.kind(), e.what()};
    } catch (const std::exception& e) {
        point.failure = Failure{stage, ErrorKind::Convergence, e.what()};
    }
    return point;
}

RunArtifact run(const ScenarioConfig& config, const RunOptions& options)
{
    if (config.run.paper_scale && !options.paper_scale) {
        fail(ErrorKind::ConfigValidation, "'paper_scale': this preset needs the --paper-scale flag");
    }
    if (config.run.paper_scale) {
        std::cerr << "warning: paper-scale run; expect between 20 and 48 hours of compute per point\n";
    }
    std::vector<OutputKind> outputs = config.outputs;
    if (options.only) outputs = {*options.only};

    std::vector<std::optional<double>> values;
    if (config.sweep) {
        for (double v : config.sweep->values) values.emplace_back(v);
    } else {
        values.emplace_back(std::nullopt);
    }

    const auto start = std::chrono::steady_clock::now();
    RunArtifact art;
    art.points.resize(values.size());
    const std::size_t workers = std::max<std::size_t>(1, options.workers);
    const std::size_t inner = values.size() == 1 ? workers : 1;
    parallel_for(values.size(), workers,
                 [&](std::size_t i) { art.points[i] = run_point(config, outputs, values[i], inner); });
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    // Output assembly is serial and ordered by sweep index.
    fs::create_directories(options.out_dir);
    const std::string axis = config.sweep ? config.sweep->axis : std::string();
    auto with_axis = [&](std::vector<std::string> cols) {
        if (config.sweep) cols.insert(cols.begin(), axis);
        return cols;
    };
    auto row = [&](const PointResult& pt, std::vector<double> vals) {
        if (pt.sweep_value) vals.insert(vals.begin(), *pt.sweep_value);
        return vals;
    };
    auto file = [&](const std::string& output) {
        const fs::path path = options.out_dir / (config.name + "_" + output + ".csv");
        art.files.push_back(path);
        return CsvWriter(path);
    };

    if (wants(outputs, OutputKind::Spectrum)) {
        CsvWriter csv = file("spectrum");
        csv.header(with_axis({"omega", "S"}));
        for (const auto& pt : art.points) {
            if (!pt.spectrum) continue;
            for (std::size_t k = 0; k < pt.spectrum->omegas.size(); ++k) {
                csv.row(row(pt, {pt.spectrum->omegas[k], pt.spectrum->values[k]}));
            }
        }
        if (config.analysis.reference != Reference::None) {
            CsvWriter ref = file("reference");
            ref.header(with_axis({"omega", "S"}));
            for (const auto& pt : art.points) {
                if (!pt.reference) continue;
                for (std::size_t k = 0; k < pt.reference->omegas.size(); ++k) {
                    ref.row(row(pt, {pt.reference->omegas[k], pt.reference->values[k]}));
                }
            }
        }
        if (config.analysis.splitting || config.analysis.linewidth) {
            CsvWriter peaks = file("peaks");
            peaks.header(with_axis({"peaks", "splitting", "fwhm", "normalized_linewidth"}));
            for (const auto& pt : art.points) {
                if (!pt.peaks) continue;
                const auto& pk = *pt.peaks;
                peaks.row(row(pt, {static_cast<double>(pk.count), pk.splitting, pk.fwhm, pk.normalized_linewidth}));
            }
        }
    }
    if (wants(outputs, OutputKind::Dynamics)) {
        CsvWriter csv = file("dynamics");
        std::vector<std::string> cols{"t"};
        for (const auto& pt : art.points) {
            if (pt.dynamics) {
                cols.insert(cols.end(), pt.dynamics->labels.begin(), pt.dynamics->labels.end());
                break;
            }
        }
        csv.header(with_axis(cols));
        for (const auto& pt : art.points) {
            if (!pt.dynamics) continue;
            const auto& ts = *pt.dynamics;
            for (std::size_t k = 0; k < ts.times.size(); ++k) {
                std::vector<double> vals{ts.times[k]};
                for (const auto& series : ts.values) vals.push_back(series[k].real());
                csv.row(row(pt, vals));
            }
        }
    }
    if (wants(outputs, OutputKind::Steady)) {
        CsvWriter csv = file("steady");
        csv.header(with_axis({"n_b", "n_mode", "n_a", "sigma_ee", "residual"}));
        for (const auto& pt : art.points) {
            if (!pt.steady) continue;
            const auto& s = *pt.steady;
            csv.row(row(pt, {s.n_b, s.n_mode, s.n_a, s.sigma_ee, s.residual}));
        }
    }
    if (wants(outputs, OutputKind::Fit)) {
        CsvWriter csv = file("fit");
        csv.header(with_axis({"lambda", "objective"}));
        CsvWriter summary = file("fit_summary");
        summary.header(with_axis({"lambda_fit", "objective"}));
        for (const auto& pt : art.points) {
            if (!pt.fit) continue;
            for (std::size_t k = 0; k < pt.fit->grid.size(); ++k) {
                csv.row(row(pt, {pt.fit->grid[k], pt.fit->objectives[k]}));
            }
            summary.row(row(pt, {pt.fit->lambda_fit, pt.fit->objective}));
        }
    }

    bool solver_failed = false;
    bool analysis_failed = false;
    json points = json::array();
    for (std::size_t i = 0; i < art.points.size(); ++i) {
        const auto& pt = art.points[i];
        json j;
        j["index"] = i;
        j["sweep_value"] = pt.sweep_value ? json(*pt.sweep_value) : json(nullptr);
        j["params_hash"] = pt.params_hash;
        j["status"] = pt.failure ? "failed" : (pt.analysis_failures.empty() ? "ok" : "analysis_failed");
        if (pt.failure) {
            j["failure"] = failure_json(*pt.failure);
            if (exit_code_for(pt.failure->kind) == ExitCode::AnalysisError) analysis_failed = true;
            else solver_failed = true;
        }
        if (!pt.analysis_failures.empty()) {
            analysis_failed = true;
            json list = json::array();
            for (const auto& f : pt.analysis_failures) list.push_back(failure_json(f));
            j["analysis_failures"] = list;
        }
        json diag = json::object();
        if (pt.spectrum) diag["spectrum"] = spectrum_json(*pt.spectrum);
        if (pt.reference) diag["reference"] = spectrum_json(*pt.reference);
        if (pt.steady) {
            diag["steady"] = {{"residual", pt.steady->residual},
                              {"clipped_mass", pt.steady->clipped_mass},
                              {"layout", pt.steady->layout}};
        }
        if (pt.dynamics) {
            diag["dynamics"] = {{"trace_drift", pt.dynamics->trace_drift},
                                {"hermiticity_drift", pt.dynamics->hermiticity_drift}};
        }
        if (pt.fit) {
            diag["fit"] = {{"lambda_fit", pt.fit->lambda_fit},
                           {"objective", pt.fit->objective},
                           {"failures", pt.fit->failures}};
        }
        if (pt.peaks) {
            diag["peaks"] = {{"count", pt.peaks->count},
                             {"splitting", number_or_null(pt.peaks->splitting)},
                             {"fwhm", number_or_null(pt.peaks->fwhm)},
                             {"normalized_linewidth", number_or_null(pt.peaks->normalized_linewidth)}};
        }
        j["diagnostics"] = diag;
        points.push_back(j);
    }
    art.exit_code = solver_failed ? ExitCode::SolverError
                                  : (analysis_failed ? ExitCode::AnalysisError : ExitCode::Success);

    json params = json::object();
    for (const auto& key : param_keys()) params[key] = number_or_null(config.params.at(key));
    params["frame"] = to_string(config.frame);

    json manifest;
    manifest["scenario"] = config.name;
    manifest["command"] = options.command;
    manifest["model"] = to_string(config.model);
    manifest["config_hash"] = config.hash();
    manifest["config"] = config.source;
    manifest["params"] = params;
    if (config.sweep) manifest["sweep"] = {{"axis", config.sweep->axis}, {"values", config.sweep->values}};
    json outs = json::array();
    for (auto k : outputs) outs.push_back(to_string(k));
    manifest["outputs"] = outs;
    json files = json::array();
    for (const auto& f : art.files) files.push_back(f.filename().string());
    manifest["files"] = files;
    manifest["workers"] = workers;
    manifest["wall_time_s"] = wall;
    manifest["exit_code"] = static_cast<int>(art.exit_code);
    manifest["points"] = points;

    art.manifest = options.out_dir / (config.name + "_manifest.json");
    std::ofstream out(art.manifest, std::ios::binary);
    if (!out) fail(ErrorKind::ConfigValidation, "cannot write '" + art.manifest.string() + "'");
    out << manifest.dump(2) << "\n";
    return art;
}

} // namespace cqed
