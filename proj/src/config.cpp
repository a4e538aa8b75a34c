// config.cpp - key=value scenario files

#include "cqed/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace cqed {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct ParamSpec {
    const char* key;
    double fallback;
    bool boolean;
};

// NaN marks an optional key that is only used when set.
const std::vector<ParamSpec>& param_specs()
{
    static const std::vector<ParamSpec> specs = {
        {"delta_a", 0.0, false},       {"delta_b", 1.0, false},        {"delta_beta", kUnset, false},
        {"delta_q", 1.0, false},       {"E_a", 0.0, false},            {"E_a_phase", 0.0, false},
        {"ea_frac", kUnset, false},    {"source_matched", 0.0, true},  {"match_source", 0.0, true},
        {"E_b", 0.0, false},           {"kappa_a", 0.0, false},        {"kappa_ratio", kUnset, false},
        {"kappa_b", 0.015, false},     {"kappa_i", 0.0, false},        {"eta", kUnset, false},
        {"gamma", 0.001, false},       {"g", 0.003, false},            {"r", 0.0, false},
        {"squeeze_db", kUnset, false}, {"theta", 0.0, false},          {"r_e", 0.0, false},
        {"theta_e", kUnset, false},    {"n_a", 10.0, false},           {"n_b", 10.0, false},
        {"qubit", 1.0, true},          {"matched", 1.0, true},         {"include_h_err", 1.0, true},
        {"lambda", 0.0, false},
    };
    return specs;
}

[[noreturn]] void syntax_error(std::size_t line, const std::string& what)
{
    fail(ErrorKind::ConfigSyntax, "line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void invalid(const std::string& key, const std::string& what)
{
    fail(ErrorKind::ConfigValidation, "'" + key + "': " + what);
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_number(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        invalid(key, "expected a number, got '" + value + "'");
    }
    if (used != value.size()) invalid(key, "expected a number, got '" + value + "'");
    if (!std::isfinite(out)) invalid(key, "value must be finite");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    invalid(key, "expected true or false, got '" + value + "'");
}

std::size_t parse_count(const std::string& key, const std::string& value)
{
    const double v = parse_number(key, value);
    if (v < 0.0 || v != std::floor(v)) invalid(key, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

ModelKind parse_model(const std::string& value)
{
    if (value == "ideal") return ModelKind::Ideal;
    if (value == "cascade") return ModelKind::Cascade;
    if (value == "fit") return ModelKind::Fit;
    invalid("model", "expected ideal, cascade or fit, got '" + value + "'");
}

OutputKind parse_output(const std::string& value)
{
    if (value == "spectrum") return OutputKind::Spectrum;
    if (value == "dynamics") return OutputKind::Dynamics;
    if (value == "steady") return OutputKind::Steady;
    if (value == "fit") return OutputKind::Fit;
    invalid("outputs", "unknown output '" + value + "'");
}

const ParamSpec* find_param(const std::string& key)
{
    for (const auto& s : param_specs()) {
        if (key == s.key) return &s;
    }
    return nullptr;
}

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct Parser {
    ScenarioConfig cfg;
    std::set<std::string> seen;
    std::optional<std::string> sweep_axis;
    std::optional<std::string> sweep_values;
    std::optional<std::string> sweep_linspace;

    void top(const std::string& key, const std::string& value)
    {
        if (key == "scenario") {
            if (value.empty() || value.find_first_of("/\\ ") != std::string::npos) {
                invalid(key, "name must be non-empty without spaces or slashes");
            }
            cfg.name = value;
        } else if (key == "model") {
            cfg.model = parse_model(value);
        } else if (key == "outputs") {
            cfg.outputs.clear();
            for (const auto& item : split_list(value)) {
                if (!item.empty()) cfg.outputs.push_back(parse_output(item));
            }
        } else {
            invalid(key, "unknown key");
        }
    }

    void params(const std::string& key, const std::string& value)
    {
        if (key == "frame") {
            if (value == "lab") cfg.frame = Frame::Lab;
            else if (value == "bogoliubov") cfg.frame = Frame::Bogoliubov;
            else invalid(key, "expected lab or bogoliubov");
            return;
        }
        const ParamSpec* spec = find_param(key);
        if (!spec) invalid(key, "unknown parameter");
        cfg.params[key] = spec->boolean ? (parse_bool(key, value) ? 1.0 : 0.0) : parse_number(key, value);
    }

    void sweep(const std::string& key, const std::string& value)
    {
        if (key == "axis") sweep_axis = value;
        else if (key == "values") sweep_values = value;
        else if (key == "linspace") sweep_linspace = value;
        else invalid("sweep." + key, "unknown key");
    }

    void run(const std::string& key, const std::string& value)
    {
        auto& r = cfg.run;
        if (key == "tf_multiplier") r.tf_multiplier = parse_number(key, value);
        else if (key == "omega_min") r.omega_min = parse_number(key, value);
        else if (key == "omega_max") r.omega_max = parse_number(key, value);
        else if (key == "omega_points") r.omega_points = parse_count(key, value);
        else if (key == "dt") r.dt = parse_number(key, value);
        else if (key == "window_tol") r.window_tol = parse_number(key, value);
        else if (key == "krylov_tol") r.krylov_tol = parse_number(key, value);
        else if (key == "krylov_max_dim") r.krylov_max_dim = parse_count(key, value);
        else if (key == "t_max") r.t_max = parse_number(key, value);
        else if (key == "t_points") r.t_points = parse_count(key, value);
        else if (key == "rtol") r.rtol = parse_number(key, value);
        else if (key == "atol") r.atol = parse_number(key, value);
        else if (key == "adaptive_truncation") r.adaptive_truncation = parse_bool(key, value);
        else if (key == "truncation_cap") r.truncation_cap = parse_count(key, value);
        else if (key == "truncation_tol") r.truncation_tol = parse_number(key, value);
        else if (key == "fit_step") r.fit_step = parse_number(key, value);
        else if (key == "paper_scale") r.paper_scale = parse_bool(key, value);
        else if (key == "initial") {
            if (value == "excited") r.initial = InitialState::Excited;
            else if (value == "ground") r.initial = InitialState::Ground;
            else if (value == "steady") r.initial = InitialState::Steady;
            else invalid(key, "expected excited, ground or steady");
        } else {
            invalid("run." + key, "unknown key");
        }
    }

    void analysis(const std::string& key, const std::string& value)
    {
        auto& a = cfg.analysis;
        if (key == "splitting") a.splitting = parse_bool(key, value);
        else if (key == "linewidth") a.linewidth = parse_bool(key, value);
        else if (key == "min_prominence") a.min_prominence = parse_number(key, value);
        else if (key == "reference") {
            if (value == "none") a.reference = Reference::None;
            else if (value == "ideal") a.reference = Reference::Ideal;
            else if (value == "vacuum") a.reference = Reference::Vacuum;
            else invalid(key, "expected none, ideal or vacuum");
        } else {
            invalid("analysis." + key, "unknown key");
        }
    }

    void finish()
    {
        for (const auto& s : param_specs()) cfg.params.try_emplace(s.key, s.fallback);

        if (cfg.outputs.empty()) invalid("outputs", "at least one output is required");
        if (sweep_axis || sweep_values || sweep_linspace) {
            if (!sweep_axis) invalid("sweep.axis", "missing");
            if (!find_param(*sweep_axis)) invalid("sweep.axis", "unknown parameter '" + *sweep_axis + "'");
            if (find_param(*sweep_axis)->boolean) invalid("sweep.axis", "cannot sweep a boolean");
            if (sweep_values.has_value() == sweep_linspace.has_value()) {
                invalid("sweep.values", "give exactly one of values or linspace");
            }
            Sweep s;
            s.axis = *sweep_axis;
            if (sweep_values) {
                for (const auto& item : split_list(*sweep_values)) s.values.push_back(parse_number("sweep.values", item));
            } else {
                const auto parts = split_list(*sweep_linspace);
                if (parts.size() != 3) invalid("sweep.linspace", "expected start, stop, count");
                const double a = parse_number("sweep.linspace", parts[0]);
                const double b = parse_number("sweep.linspace", parts[1]);
                const std::size_t n = parse_count("sweep.linspace", parts[2]);
                if (n < 2) invalid("sweep.linspace", "count must be at least 2");
                for (std::size_t i = 0; i < n; ++i) {
                    s.values.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
                }
            }
            if (s.values.empty()) invalid("sweep.values", "empty list");
            cfg.sweep = std::move(s);
        }

        const auto& r = cfg.run;
        if (!(r.omega_max > r.omega_min)) invalid("omega_max", "must exceed omega_min");
        if (r.omega_points < 3) invalid("omega_points", "need at least 3 points");
        if (!(r.tf_multiplier > 0.0)) invalid("tf_multiplier", "must be positive");
        if (r.dt < 0.0) invalid("dt", "must be non-negative");
        if (!(r.t_max > 0.0)) invalid("t_max", "must be positive");
        if (r.t_points < 2) invalid("t_points", "need at least 2 points");
        if (!(r.fit_step > 0.0 && r.fit_step <= 1.0)) invalid("fit_step", "must lie in (0, 1]");
        if (!(r.krylov_tol > 0.0)) invalid("krylov_tol", "must be positive");
        if (!(r.truncation_tol > 0.0)) invalid("truncation_tol", "must be positive");

        for (const char* key : {"n_a", "n_b"}) {
            const double v = cfg.params.at(key);
            if (v < 2.0 || v != std::floor(v)) invalid(key, "truncation must be an integer >= 2");
        }
        for (const char* key : {"kappa_a", "kappa_b", "kappa_i", "gamma", "r", "r_e"}) {
            if (cfg.params.at(key) < 0.0) invalid(key, "must be non-negative");
        }
        const double lambda = cfg.params.at("lambda");
        if (lambda < 0.0 || lambda > 1.0) invalid("lambda", "must lie in [0, 1]");
        if (!std::isnan(cfg.params.at("kappa_ratio")) && cfg.params.at("kappa_a") != 0.0) {
            invalid("kappa_ratio", "conflicts with kappa_a");
        }
        if (!std::isnan(cfg.params.at("ea_frac")) && cfg.params.at("source_matched") != 0.0) {
            invalid("ea_frac", "conflicts with source_matched");
        }
        if (cfg.params.at("match_source") != 0.0 &&
            (cfg.params.at("source_matched") != 0.0 || !std::isnan(cfg.params.at("squeeze_db")))) {
            invalid("match_source", "conflicts with source_matched and squeeze_db");
        }
        if (!std::isnan(cfg.params.at("squeeze_db")) && cfg.params.at("r") != 0.0) {
            invalid("squeeze_db", "conflicts with r");
        }
        if (!std::isnan(cfg.params.at("eta")) && cfg.params.at("kappa_i") != 0.0) {
            invalid("eta", "conflicts with kappa_i");
        }
        if (cfg.analysis.linewidth && cfg.analysis.reference == Reference::None) {
            invalid("linewidth", "needs analysis.reference = ideal or vacuum");
        }
        if (cfg.model == ModelKind::Fit && std::find(cfg.outputs.begin(), cfg.outputs.end(), OutputKind::Fit) !=
                                               cfg.outputs.end()) {
            invalid("outputs", "the fit output needs an ideal or cascade target model");
        }
    }
};

} // namespace

const char* to_string(ModelKind kind)
{
    switch (kind) {
    case ModelKind::Ideal: return "ideal";
    case ModelKind::Cascade: return "cascade";
    case ModelKind::Fit: return "fit";
    }
    return "?";
}

const char* to_string(OutputKind kind)
{
    switch (kind) {
    case OutputKind::Spectrum: return "spectrum";
    case OutputKind::Dynamics: return "dynamics";
    case OutputKind::Steady: return "steady";
    case OutputKind::Fit: return "fit";
    }
    return "?";
}

const std::vector<std::string>& param_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& s : param_specs()) out.emplace_back(s.key);
        return out;
    }();
    return keys;
}

std::string ScenarioConfig::hash() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(source)));
    return buf;
}

ScenarioConfig parse_config(std::string_view text)
{
    Parser p;
    p.cfg.source = std::string(text);
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }

        if (line.front() == '[') {
            if (line.back() != ']') syntax_error(line_no, "unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "params" && section != "sweep" && section != "run" && section != "analysis") {
                syntax_error(line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) syntax_error(line_no, "expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) syntax_error(line_no, "missing key");
        if (value.empty()) syntax_error(line_no, "missing value for '" + key + "'");
        if (!p.seen.insert(section + "." + key).second) syntax_error(line_no, "duplicate key '" + key + "'");

        if (section.empty()) p.top(key, value);
        else if (section == "params") p.params(key, value);
        else if (section == "sweep") p.sweep(key, value);
        else if (section == "run") p.run(key, value);
        else p.analysis(key, value);
        if (end == text.size()) break;
    }
    p.finish();
    return std::move(p.cfg);
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::ConfigValidation, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

SystemParams resolve_params(const ScenarioConfig& config, std::optional<double> sweep_value)
{
    std::map<std::string, double> v = config.params;
    if (sweep_value) {
        if (!config.sweep) fail(ErrorKind::InvalidArgument, "resolve_params: config has no sweep");
        v[config.sweep->axis] = *sweep_value;
    }
    auto set = [&](const char* key) { return !std::isnan(v.at(key)); };

    SystemParams p;
    p.frame = config.frame;
    p.include_h_err = v.at("include_h_err") != 0.0;
    p.squeeze.r = set("squeeze_db") ? squeeze::db_to_r(v.at("squeeze_db")) : v.at("r");
    p.squeeze.theta = v.at("theta");
    p.squeeze.r_e = v.at("r_e");
    p.squeeze.theta_e = set("theta_e") ? v.at("theta_e") : std::numbers::pi - p.squeeze.theta;

    p.kappa_b = v.at("kappa_b");
    p.kappa_a = set("kappa_ratio") ? v.at("kappa_ratio") * p.kappa_b : v.at("kappa_a");
    p.kappa_i = set("eta") ? v.at("eta") * p.kappa_b : v.at("kappa_i");
    p.gamma = v.at("gamma");
    p.g = v.at("g");

    double ea = v.at("E_a");
    if (set("ea_frac")) ea = v.at("ea_frac") * p.kappa_a;
    if (v.at("source_matched") != 0.0) {
        ea = p.kappa_a * squeeze::source_drive_fraction_for(p.squeeze.r);
    }
    p.E_a = std::polar(ea, v.at("E_a_phase"));
    if (v.at("match_source") != 0.0) {
        const double n = p.kappa_i > 0.0 ? squeeze::steady_state_photon_lossy(p.kappa_a, p.kappa_b, p.kappa_i, ea)
                                         : squeeze::steady_state_photon_lossless(p.kappa_a, p.kappa_b, ea);
        p.squeeze.r = std::asinh(std::sqrt(n));
    }
    p.E_b = v.at("E_b");

    p.delta_a = v.at("delta_a");
    p.delta_q = v.at("delta_q");
    p.delta_b = set("delta_beta") ? delta_b_for(v.at("delta_beta"), p.squeeze.r) : v.at("delta_b");

    for (const char* key : {"n_a", "n_b"}) {
        const double n = v.at(key);
        if (n < 2.0 || n != std::floor(n)) fail(ErrorKind::ConfigValidation, std::string("'") + key + "': truncation must be an integer >= 2");
    }
    const auto n_a = static_cast<std::size_t>(v.at("n_a"));
    const auto n_b = static_cast<std::size_t>(v.at("n_b"));
    std::vector<Subsystem> dims;
    if (config.model == ModelKind::Cascade) dims.push_back(Subsystem::fock(n_a));
    dims.push_back(Subsystem::fock(n_b));
    if (v.at("qubit") != 0.0) dims.push_back(Subsystem::qubit());
    p.trunc = make_space(dims);
    return p;
}

} // namespace cqed
