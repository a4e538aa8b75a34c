#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "cqed/scenario.hpp"

using namespace cqed;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("cqed_test_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t lines(const fs::path& path)
{
    const std::string s = slurp(path);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::string preset(const std::string& name)
{
    return slurp(fs::path(CQED_PRESET_DIR) / (name + ".cfg"));
}

std::string replace(std::string text, const std::string& from, const std::string& to)
{
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

// Small strong-coupling sweep over r, fast enough for unit tests.
const std::string kSweep =
    "scenario = mini\n"
    "model = ideal\n"
    "outputs = spectrum, steady\n"
    "[params]\n"
    "g = 0.015\n"
    "delta_beta = 1\n"
    "n_b = 5\n"
    "[sweep]\n"
    "axis = r\n"
    "values = 0, 0.4, 0.8\n"
    "[run]\n"
    "omega_min = 0.9\n"
    "omega_max = 1.1\n"
    "omega_points = 401\n"
    "[analysis]\n"
    "splitting = true\n";

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("sweep emits ordered CSVs with one row per grid point")
{
    const ScenarioConfig c = parse_config(kSweep);
    RunOptions o;
    o.out_dir = scratch("rows");
    const RunArtifact art = run(c, o);
    CHECK(art.exit_code == ExitCode::Success);
    REQUIRE(art.files.size() == 3);
    CHECK(art.files[0].filename() == "mini_spectrum.csv");
    CHECK(art.files[1].filename() == "mini_peaks.csv");
    CHECK(art.files[2].filename() == "mini_steady.csv");
    CHECK(lines(art.files[0]) == 1 + 3 * 401);
    CHECK(lines(art.files[1]) == 1 + 3);
    CHECK(lines(art.files[2]) == 1 + 3);
    CHECK(slurp(art.files[0]).rfind("r,omega,S\n0,0.9", 0) == 0);
    CHECK(slurp(art.files[2]).rfind("r,n_b,n_mode,n_a,sigma_ee,residual\n", 0) == 0);

    // splitting grows with r
    double previous = 0.0;
    for (const auto& pt : art.points) {
        REQUIRE(pt.peaks);
        CHECK(pt.peaks->splitting > previous);
        previous = pt.peaks->splitting;
    }

    const auto manifest = nlohmann::json::parse(slurp(art.manifest));
    CHECK(manifest["config_hash"] == c.hash());
    CHECK(manifest["config"] == kSweep);
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest["points"].size() == 3);
    CHECK(manifest["points"][1]["sweep_value"] == 0.4);
    CHECK(manifest["points"][1]["status"] == "ok");
    fs::remove_all(o.out_dir);
}

TEST_CASE("property: identical configs give byte-identical CSVs for any worker count")
{
    const ScenarioConfig c = parse_config(kSweep);
    RunOptions a;
    a.out_dir = scratch("det_a");
    RunOptions b = a;
    b.out_dir = scratch("det_b");
    RunOptions w = a;
    w.out_dir = scratch("det_w");
    w.workers = 3;
    const RunArtifact ra = run(c, a);
    const RunArtifact rb = run(c, b);
    const RunArtifact rw = run(c, w);
    for (std::size_t i = 0; i < ra.files.size(); ++i) {
        CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
        CHECK(slurp(ra.files[i]) == slurp(rw.files[i]));
    }
    for (const auto& d : {a.out_dir, b.out_dir, w.out_dir}) fs::remove_all(d);
}

TEST_CASE("dynamics CSV")
{
    const ScenarioConfig c = parse_config(
        "scenario = dyn\nmodel = ideal\noutputs = dynamics\n"
        "[params]\ng = 0.015\nn_b = 4\n[run]\nt_max = 200\nt_points = 51\n");
    RunOptions o;
    o.out_dir = scratch("dyn");
    const RunArtifact art = run(c, o);
    REQUIRE(art.files.size() == 1);
    CHECK(slurp(art.files[0]).rfind("t,sigma_ee,n_b\n0,1,0\n", 0) == 0);
    CHECK(lines(art.files[0]) == 52);
    fs::remove_all(o.out_dir);
}

TEST_CASE("washed-out splitting exits with the analysis code")
{
    std::string text = replace(preset("loss_sweep"), "values = 0, 0.1, 0.5, 1.0", "values = 0.1, 1.0");
    text = replace(text, "n_b = 14", "n_b = 10");
    const ScenarioConfig c = parse_config(text);
    RunOptions o;
    o.out_dir = scratch("loss");
    const RunArtifact art = run(c, o);
    CHECK(art.exit_code == ExitCode::AnalysisError);
    REQUIRE(art.points.size() == 2);
    CHECK(art.points[0].analysis_failures.empty());
    REQUIRE(art.points[1].analysis_failures.size() == 1);
    CHECK(art.points[1].analysis_failures[0].kind == ErrorKind::InsufficientPeaks);
    // partial results are kept
    CHECK(lines(art.files[0]) == 1 + 2 * 2001);
    const auto manifest = nlohmann::json::parse(slurp(art.manifest));
    CHECK(manifest["points"][1]["status"] == "analysis_failed");
    CHECK(manifest["exit_code"] == 4);
    fs::remove_all(o.out_dir);
}

TEST_CASE("solver failures are recorded per point")
{
    const ScenarioConfig c = parse_config(
        "scenario = bad\nmodel = cascade\noutputs = steady\n"
        "[params]\ng = 0\nqubit = false\nkappa_a = 1\nn_a = 3\nn_b = 3\n"
        "[sweep]\naxis = E_a\nvalues = 0.1, 0.3\n");
    RunOptions o;
    o.out_dir = scratch("bad");
    const RunArtifact art = run(c, o);
    CHECK(art.exit_code == ExitCode::SolverError);
    CHECK_FALSE(art.points[0].failure);
    REQUIRE(art.points[1].failure);
    CHECK(art.points[1].failure->kind == ErrorKind::Threshold);
    CHECK(lines(art.files[0]) == 2);
    fs::remove_all(o.out_dir);
}

TEST_CASE("paper-scale presets need the flag")
{
    const ScenarioConfig c = load_config(std::string(CQED_PRESET_DIR) + "/fig2_weak.cfg");
    RunOptions o;
    o.out_dir = scratch("paper");
    try {
        run(c, o);
        FAIL("expected the --paper-scale gate");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigValidation);
        CHECK(exit_code_for(e.kind()) == ExitCode::ConfigError);
    }
    CHECK_FALSE(fs::exists(o.out_dir));
}

TEST_CASE("exit codes and number formatting")
{
    CHECK(exit_code_for(ErrorKind::ConfigSyntax) == ExitCode::ConfigError);
    CHECK(exit_code_for(ErrorKind::InsufficientPeaks) == ExitCode::AnalysisError);
    CHECK(exit_code_for(ErrorKind::MultiPeak) == ExitCode::AnalysisError);
    CHECK(exit_code_for(ErrorKind::Convergence) == ExitCode::SolverError);
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(2.0) == "2");
}

}
