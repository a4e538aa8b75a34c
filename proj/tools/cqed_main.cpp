// cqed - command line front end for scenario runs and closed-form formulas

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "cqed/scenario.hpp"
#include "cqed/squeeze.hpp"

namespace {

using Row = std::pair<std::string, double>;

void print_rows(const std::vector<Row>& rows, bool csv)
{
    if (csv) {
        std::cout << "name,value\n";
        for (const auto& [name, value] : rows) std::cout << name << "," << cqed::format_double(value) << "\n";
        return;
    }
    for (const auto& [name, value] : rows) std::printf("%-16s %.10g\n", name.c_str(), value);
}

struct RunArgs {
    std::string config;
    std::string out{"."};
    bool paper_scale{false};
    int workers{0};
};

void add_run_flags(CLI::App* cmd, RunArgs& args)
{
    cmd->add_option("--config", args.config, "scenario file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_flag("--paper-scale", args.paper_scale, "allow paper-scale presets");
    cmd->add_option("--workers", args.workers, "sweep workers (default: CQED_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
}

int run_scenario(const RunArgs& args, const std::string& command, std::optional<cqed::OutputKind> only)
{
    const cqed::ScenarioConfig config = cqed::load_config(args.config);
    if (command == "sweep" && !config.sweep) {
        cqed::fail(cqed::ErrorKind::ConfigValidation, "'sweep': the sweep command needs a [sweep] section");
    }
    cqed::RunOptions opts;
    opts.out_dir = args.out;
    opts.workers = args.workers > 0 ? static_cast<std::size_t>(args.workers) : cqed::default_workers();
    opts.paper_scale = args.paper_scale;
    opts.only = only;
    opts.command = command;
    const cqed::RunArtifact art = cqed::run(config, opts);

    for (const auto& f : art.files) std::cout << f.string() << "\n";
    std::cout << art.manifest.string() << "\n";
    for (const auto& pt : art.points) {
        const std::string where = pt.sweep_value ? " at " + config.sweep->axis + " = " +
                                                       cqed::format_double(*pt.sweep_value)
                                                 : std::string();
        if (pt.failure) {
            std::cerr << "error" << where << " (" << pt.failure->stage << "): " << pt.failure->message << "\n";
        }
        for (const auto& f : pt.analysis_failures) {
            std::cerr << "analysis" << where << " (" << f.stage << "): " << f.message << "\n";
        }
    }
    return static_cast<int>(art.exit_code);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cavity QED with finite-bandwidth squeezed drives"};
    app.require_subcommand(1);

    RunArgs run_args;
    const std::vector<std::pair<std::string, std::optional<cqed::OutputKind>>> run_commands = {
        {"spectrum", cqed::OutputKind::Spectrum},
        {"dynamics", cqed::OutputKind::Dynamics},
        {"steady", cqed::OutputKind::Steady},
        {"fit", cqed::OutputKind::Fit},
        {"sweep", std::nullopt},
    };
    std::vector<CLI::App*> run_apps;
    for (const auto& [name, kind] : run_commands) {
        CLI::App* cmd = app.add_subcommand(name, name == "sweep" ? "run every configured output over the sweep"
                                                                 : "compute the " + name + " output");
        add_run_flags(cmd, run_args);
        run_apps.push_back(cmd);
    }

    CLI::App* formulas = app.add_subcommand("formulas", "evaluate closed-form relations");
    formulas->require_subcommand(1);
    bool csv = false;
    formulas->add_flag("--csv", csv, "print name,value rows");

    double r = 0.0, eta = 0.0, kappa_a = 0.0, kappa_b = 0.0, kappa_i = 0.0, ea_frac = 0.0, db = 0.0;
    double nss = 0.0, delta_b = 1.0;
    std::vector<Row> rows;

    auto* n_eff = formulas->add_subcommand("n-eff", "squeezed-frame thermal occupation with intrinsic loss");
    n_eff->add_option("--r", r)->required();
    n_eff->add_option("--eta", eta)->required();
    n_eff->callback([&] { rows = {{"n_eff", cqed::squeeze::effective_thermal_occupation(r, eta)}}; });

    auto* r_e = formulas->add_subcommand("r-e", "reservoir squeezing that matches r with intrinsic loss");
    r_e->add_option("--r", r)->required();
    r_e->add_option("--eta", eta)->required();
    r_e->callback([&] { rows = {{"r_e", cqed::squeeze::matched_external_squeezing(r, eta)}}; });

    auto* nss_cmd = formulas->add_subcommand("nss", "steady photon number of a cavity fed by the source");
    nss_cmd->add_option("--kappa-a", kappa_a)->required();
    nss_cmd->add_option("--kappa-b", kappa_b)->required();
    nss_cmd->add_option("--ea-frac", ea_frac, "|E_a| / kappa_a")->required();
    nss_cmd->add_option("--kappa-i", kappa_i, "intrinsic loss of the driven cavity");
    nss_cmd->callback([&] {
        const double ea = ea_frac * kappa_a;
        const double n = kappa_i > 0.0 ? cqed::squeeze::steady_state_photon_lossy(kappa_a, kappa_b, kappa_i, ea)
                                       : cqed::squeeze::steady_state_photon_lossless(kappa_a, kappa_b, ea);
        rows = {{"n_b_ss", n}, {"r_matched", std::asinh(std::sqrt(n))}};
    });

    auto* db_cmd = formulas->add_subcommand("db", "convert squeezing between r and dB");
    auto* r_opt = db_cmd->add_option("--r", r);
    auto* db_opt = db_cmd->add_option("--db", db);
    r_opt->excludes(db_opt);
    db_cmd->callback([&] {
        if (db_opt->count() > 0) rows = {{"r", cqed::squeeze::db_to_r(db)}, {"db", db}};
        else if (r_opt->count() > 0) rows = {{"r", r}, {"db", cqed::squeeze::r_to_db(r)}};
        else throw CLI::ValidationError("db", "give --r or --db");
    });

    auto* bath = formulas->add_subcommand("bath", "Markovian output correlations of the source");
    bath->add_option("--kappa-a", kappa_a)->required();
    bath->add_option("--ea-frac", ea_frac)->required();
    bath->callback([&] {
        const double ea = ea_frac * kappa_a;
        const auto c = cqed::squeeze::markovian_bath_coeffs(kappa_a, ea);
        const auto rates = cqed::squeeze::opo_rates(kappa_a, ea);
        rows = {{"N", c.N}, {"abs_M", std::abs(c.M)}, {"arg_M", std::arg(c.M)},
                {"rate_fast", rates.fast}, {"rate_slow", rates.slow}};
    });

    auto* drive = formulas->add_subcommand("drive", "intracavity drive matching a steady photon number");
    drive->add_option("--nss", nss)->required();
    drive->add_option("--delta-b", delta_b)->required();
    drive->callback([&] {
        const auto d = cqed::squeeze::matched_intracavity_drive(nss, delta_b);
        rows = {{"r", d.r}, {"E_b", d.E_b}, {"delta_beta", delta_b / std::cosh(2.0 * d.r)}};
    });

    auto* source = formulas->add_subcommand("source", "source drive fraction whose output carries sinh^2 r");
    source->add_option("--r", r)->required();
    source->callback([&] {
        rows = {{"ea_frac", cqed::squeeze::source_drive_fraction_for(r)}, {"lambda", cqed::squeeze::lambda_from_r(r)}};
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(cqed::ExitCode::ConfigError);
    } catch (const cqed::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(cqed::exit_code_for(e.kind()));
    }

    try {
        if (formulas->parsed()) {
            print_rows(rows, csv);
            return 0;
        }
        for (std::size_t i = 0; i < run_apps.size(); ++i) {
            if (run_apps[i]->parsed()) return run_scenario(run_args, run_commands[i].first, run_commands[i].second);
        }
    } catch (const cqed::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(cqed::exit_code_for(e.kind()));
    }
    return 0;
}
