// acceptance - desk-scale acceptance criteria A1..A9, one PASS/FAIL line each
//
// Usage: cqed_acceptance [A1 A2 ...]   (no arguments: run all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/evolve.hpp"
#include "cqed/model.hpp"
#include "cqed/spectro.hpp"
#include "cqed/squeeze.hpp"

using namespace cqed;

namespace {

// Pinned tolerances.
constexpr double kA1RelTol = 1e-10;
constexpr int kA1Samples = 1000;
constexpr double kA2LosslessTol = 0.02;
constexpr double kA2LossyTol = 0.03;
constexpr double kA3VacuumTol = 1e-8;
constexpr double kA3ThermalTol = 0.05;
constexpr double kA4FinalMax = 1.25;
constexpr double kA4MaxSeconds = 15.0 * 60.0;
constexpr double kA6RelTol = 0.15;
constexpr double kA7ContrastFraction = 0.10;
constexpr double kA8GridStep = 0.05;
constexpr double kA9FwhmTol = 0.05;
constexpr double kA9RabiTol = 1e-4;
constexpr double kTraceDriftMax = 1e-8;

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass{false};
    std::string detail;
};

// Largest trace drift over every integration performed in A2..A8.
double g_max_drift = 0.0;
std::string g_drift_source = "none";

void note_drift(double drift, const std::string& where)
{
    if (drift > g_max_drift || g_drift_source == "none") {
        g_max_drift = std::max(g_max_drift, drift);
        g_drift_source = where;
    }
}

std::string fmt(const char* format, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

// Weak-coupling qubit against a squeezed drive of strength r, delta_beta = delta_q = 1.
SystemParams weak_params(double r)
{
    SystemParams p;
    p.kappa_b = 0.015;
    p.gamma = 0.001;
    p.g = 0.003;
    p.delta_q = 1.0;
    p.squeeze.r = r;
    p.squeeze.theta = 0.0;
    p.squeeze.theta_e = kPi;
    p.delta_b = delta_b_for(1.0, r);
    p.frame = Frame::Bogoliubov;
    return p;
}

SystemParams with_source(SystemParams p, double ratio, std::size_t n_a, std::size_t n_b)
{
    p.kappa_a = ratio * p.kappa_b;
    p.E_a = p.kappa_a * squeeze::source_drive_fraction_for(p.squeeze.r);
    p.trunc = make_space({Subsystem::fock(n_a), Subsystem::fock(n_b), Subsystem::qubit()});
    return p;
}

SystemParams ideal_of(SystemParams p, std::size_t n_b)
{
    p.kappa_a = 0.0;
    p.E_a = 0.0;
    p.trunc = make_space({Subsystem::fock(n_b), Subsystem::qubit()});
    return p;
}

Spectrum spectrum_of(const LindbladModel& m, const std::vector<double>& grid, const std::string& where)
{
    Spectrum s = absorption_spectrum(m, grid);
    note_drift(s.trace_drift, where);
    return s;
}

Outcome a1()
{
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> kappa_dist(0.01, 20.0);
    std::uniform_real_distribution<double> frac_dist(0.0, 0.2499);
    std::uniform_real_distribution<double> phase_dist(-kPi, kPi);
    double worst = 0.0;
    for (int i = 0; i < kA1Samples; ++i) {
        const double kappa = kappa_dist(rng);
        const Complex E = std::polar(frac_dist(rng) * kappa, phase_dist(rng));
        const auto c = squeeze::markovian_bath_coeffs(kappa, E);
        const double lhs = std::norm(c.M);
        const double rhs = c.N * (c.N + 1.0);
        if (rhs > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        else worst = std::max(worst, lhs);
    }
    bool exact = true;
    for (double r : {0.0, 0.3, 1.15, 2.3026}) {
        exact = exact && squeeze::effective_thermal_occupation(r, 0.0) == 0.0;
        exact = exact && squeeze::matched_external_squeezing(r, 0.0) == r;
    }
    for (double eta : {0.0, 0.1, 0.5, 1.0}) exact = exact && squeeze::effective_thermal_occupation(0.0, eta) == 0.0;
    return {worst <= kA1RelTol && exact,
            "max rel |M|^2 vs N(N+1) = " + fmt("%.3g", worst) + ", exact limits " + (exact ? "ok" : "broken")};
}

Outcome a2()
{
    std::string detail;
    bool pass = true;
    for (double eta : {0.0, 0.3}) {
        SystemParams p;
        p.kappa_b = 0.015;
        p.kappa_a = 100.0 * p.kappa_b;
        p.E_a = 0.1 * p.kappa_a;
        p.kappa_i = eta * p.kappa_b;
        p.g = 0.0;
        p.delta_b = 0.0;
        p.frame = Frame::Bogoliubov;
        const double oracle =
            eta == 0.0 ? squeeze::steady_state_photon_lossless(p.kappa_a, p.kappa_b, 0.1 * p.kappa_a)
                       : squeeze::steady_state_photon_lossy(p.kappa_a, p.kappa_b, p.kappa_i, 0.1 * p.kappa_a);
        // Fock basis of b squeezed by the expected occupation; the observable is lab-frame b^dag b.
        p.squeeze.r = std::asinh(std::sqrt(oracle));
        p.squeeze.theta_e = kPi;
        p.trunc = make_space({Subsystem::fock(20), Subsystem::fock(12)});
        const LindbladModel m = build_cascade(p);
        const DensityState ss = steady_state(m);
        const double nb = expect(lab_frame_observables(m).photon_number_b, ss).real();
        const double rel = std::abs(nb - oracle) / oracle;
        const double tol = eta == 0.0 ? kA2LosslessTol : kA2LossyTol;
        pass = pass && rel <= tol;
        detail += (detail.empty() ? "" : "; ") + std::string("kappa_i/kappa_b=") + fmt("%.1f", eta) + " n_b=" +
                  fmt("%.5f", nb) + " oracle=" + fmt("%.5f", oracle) + " rel=" + fmt("%.2e", rel);
    }
    return {pass, detail};
}

Outcome a3()
{
    std::string detail;
    bool pass = true;
    for (double r : {0.5, 1.15}) {
        SystemParams p = weak_params(r);
        p.g = 0.0;
        p.trunc = make_space({Subsystem::fock(10)});
        const LindbladModel m = build_ideal_bath(p, true);
        const double n = expect(number(m.layout, 0), steady_state(m)).real();
        pass = pass && std::abs(n) <= kA3VacuumTol;
        detail += "r=" + fmt("%.2f", r) + " <beta^dag beta>=" + fmt("%.2e", n) + "; ";
    }
    SystemParams p = weak_params(1.38);
    p.g = 0.0;
    p.kappa_i = 0.1 * p.kappa_b;
    p.trunc = make_space({Subsystem::fock(20)});
    const LindbladModel m = build_ideal_bath(p, true);
    const double n = expect(number(m.layout, 0), steady_state(m)).real();
    const double oracle = squeeze::effective_thermal_occupation(1.38, 0.1);
    const double rel = std::abs(n - oracle) / oracle;
    pass = pass && rel <= kA3ThermalTol;
    detail += "eta=0.1 r=1.38 <beta^dag beta>=" + fmt("%.4f", n) + " oracle=" + fmt("%.4f", oracle) +
              " rel=" + fmt("%.3f", rel);
    return {pass, detail};
}

Outcome a4()
{
    const auto t0 = std::chrono::steady_clock::now();
    const double r = squeeze::db_to_r(10.0);
    const auto grid = linspace(0.96, 1.04, 1601);
    const SystemParams base = weak_params(r);
    const Spectrum ref = spectrum_of(build_ideal_bath(ideal_of(base, 10), true), grid, "A4 reference");
    std::vector<double> widths;
    std::string detail;
    for (double ratio : {100.0, 400.0, 1600.0}) {
        const Spectrum s = spectrum_of(build_cascade(with_source(base, ratio, 8, 10)), grid, "A4 cascade");
        widths.push_back(normalized_linewidth(s, ref));
        detail += "ratio " + fmt("%.0f", ratio) + ": " + fmt("%.4f", widths.back()) + "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = widths.back() <= kA4FinalMax && secs <= kA4MaxSeconds;
    for (std::size_t i = 1; i < widths.size(); ++i) pass = pass && widths[i] < widths[i - 1];
    detail += "truncation (8,10,2), " + fmt("%.0f", secs) + " s";
    return {pass, detail};
}

Outcome a5()
{
    const double r = 0.8;
    const auto grid = linspace(0.96, 1.04, 1601);
    const SystemParams base = weak_params(r);
    const Spectrum ref = spectrum_of(build_ideal_bath(ideal_of(base, 8), true), grid, "A5 reference");
    std::vector<double> dist;
    std::string detail;
    for (double ratio : {100.0, 400.0, 1600.0}) {
        const Spectrum s = spectrum_of(build_cascade(with_source(base, ratio, 8, 8)), grid, "A5 cascade");
        dist.push_back(normalized_l1(grid, s.values, ref.values));
        detail += "ratio " + fmt("%.0f", ratio) + ": L1=" + fmt("%.3e", dist.back()) + "; ";
    }
    bool pass = true;
    for (std::size_t i = 1; i < dist.size(); ++i) pass = pass && dist[i] < dist[i - 1];
    detail += "truncation (8,8,2)";
    return {pass, detail};
}

Outcome a6()
{
    const auto grid = linspace(0.9, 1.1, 2001);
    bool pass = true;
    std::string detail;
    for (double r : {0.0, 0.7, 1.15}) {
        SystemParams p = weak_params(r);
        p.g = 0.015;
        p.trunc = make_space({Subsystem::fock(10), Subsystem::qubit()});
        const Spectrum s = spectrum_of(build_ideal_bath(p, true), grid, "A6");
        const double oracle = p.g * std::exp(r);
        std::string here;
        try {
            const double split = splitting(find_peaks(s));
            const double rel = std::abs(split - oracle) / oracle;
            pass = pass && rel <= kA6RelTol;
            here = fmt("%.4f", split) + " vs " + fmt("%.4f", oracle) + " (" + fmt("%+.1f", 100.0 * (split - oracle) / oracle) + "%)";
        } catch (const Error& e) {
            pass = false;
            here = std::string(to_string(e.kind()));
        }
        detail += "r=" + fmt("%.2f", r) + ": " + here + "; ";
    }
    detail.resize(detail.size() - 2);
    return {pass, detail};
}

// Peak-to-trough range of sigma_ee over the second half of the first Rabi cycle window.
double rabi_contrast(const LindbladModel& m, double t_max, const std::string& where)
{
    std::vector<std::size_t> levels(m.layout.size(), 0);
    const DensityState rho0 = basis_state(m.layout, levels);
    const auto times = linspace(0.0, t_max, 1201);
    const auto obs = lab_frame_observables(m);
    const TimeSeries ts = evolve_expectations(m, rho0, times, {*obs.qubit_excitation});
    note_drift(ts.trace_drift, where);
    // First local minimum after t = 0 against the following local maximum.
    const auto& v = ts.values[0];
    std::size_t i = 1;
    while (i + 1 < v.size() && !(v[i].real() <= v[i - 1].real() && v[i].real() <= v[i + 1].real())) ++i;
    std::size_t j = i + 1;
    while (j + 1 < v.size() && !(v[j].real() >= v[j - 1].real() && v[j].real() >= v[j + 1].real())) ++j;
    if (j + 1 >= v.size()) return 0.0;
    return v[j].real() - v[i].real();
}

Outcome a7()
{
    const double r = squeeze::db_to_r(12.0);
    const auto grid = linspace(0.9, 1.1, 2001);
    std::string detail;
    bool extract_low = false;
    bool washed_high = false;
    double contrast_low = 0.0;
    for (double eta : {0.1, 0.5, 1.0}) {
        SystemParams p = weak_params(r);
        p.g = 0.015;
        p.kappa_i = eta * p.kappa_b;
        p.trunc = make_space({Subsystem::fock(14), Subsystem::qubit()});
        const LindbladModel m = build_ideal_bath(p, true);
        const Spectrum s = spectrum_of(m, grid, "A7");
        std::string here;
        try {
            const double split = splitting(find_peaks(s));
            here = "splitting " + fmt("%.4f", split);
            if (eta == 0.1) extract_low = true;
        } catch (const Error& e) {
            here = std::string(to_string(e.kind()));
            if (eta == 1.0 && e.kind() == ErrorKind::InsufficientPeaks) washed_high = true;
        }
        if (eta == 0.1 || eta == 1.0) {
            const double c = rabi_contrast(m, 600.0, "A7 dynamics");
            if (eta == 0.1) contrast_low = c;
            else if (c < kA7ContrastFraction * contrast_low) washed_high = true;
            here += ", Rabi contrast " + fmt("%.3f", c);
        }
        detail += "eta=" + fmt("%.1f", eta) + ": " + here + "; ";
    }
    detail.resize(detail.size() - 2);
    return {extract_low && washed_high, detail};
}

Outcome a8()
{
    const double r = squeeze::db_to_r(10.0);
    const auto grid = linspace(0.96, 1.04, 1601);
    std::vector<double> lambdas;
    for (int i = 0; i <= 20; ++i) lambdas.push_back(kA8GridStep * i);
    const SystemParams single = ideal_of(weak_params(r), 10);

    bool pass = true;
    std::string detail = "synthetic:";
    for (double truth : {0.0, 0.3, 0.7}) {
        const Spectrum target = spectrum_of(build_fit_model(single, truth), grid, "A8 synthetic");
        const FitResult fit = fit_lambda(target, single, lambdas);
        pass = pass && std::abs(fit.lambda_fit - truth) <= kA8GridStep + 1e-12;
        detail += " " + fmt("%.2f", truth) + "->" + fmt("%.2f", fit.lambda_fit);
    }
    detail += "; cascade:";
    double previous = 2.0;
    for (double ratio : {200.0, 800.0}) {
        const Spectrum target =
            spectrum_of(build_cascade(with_source(weak_params(r), ratio, 8, 10)), grid, "A8 cascade");
        const FitResult fit = fit_lambda(target, single, lambdas);
        pass = pass && fit.lambda_fit <= previous;
        previous = fit.lambda_fit;
        detail += " ratio " + fmt("%.0f", ratio) + "->" + fmt("%.2f", fit.lambda_fit);
    }
    return {pass, detail};
}

Outcome a9()
{
    std::string detail;
    bool pass = true;

    // Damped cavity: C(tau) = <a(tau) a^dag(0)>.
    {
        const double kappa = 0.015;
        const SpaceLayout layout = make_space({Subsystem::fock(4)});
        LindbladModel m;
        m.layout = layout;
        m.H = number(layout, 0);
        m.collapse = {std::sqrt(kappa) * destroy(layout, 0)};
        const double dt = kPi / (2.0 * 1.1);
        const auto n = static_cast<std::size_t>(std::ceil(40.0 / kappa / dt));
        std::vector<double> taus(n);
        for (std::size_t k = 0; k < n; ++k) taus[k] = dt * static_cast<double>(k);
        const auto corr = two_time_correlation(m, destroy(layout, 0), create(layout, 0), taus);
        const auto grid = linspace(0.9, 1.1, 2001);
        const auto values = one_sided_spectrum(corr, dt, grid);
        const PeakSet peaks = find_peaks(grid, values);
        const double fwhm = peaks.peaks.empty() ? 0.0 : peaks.peaks[0].fwhm;
        const double rel = std::abs(fwhm - kappa) / kappa;
        pass = pass && peaks.peaks.size() == 1 && rel <= kA9FwhmTol;
        detail += "cavity FWHM " + fmt("%.5f", fwhm) + " vs kappa " + fmt("%.3f", kappa) + "; ";
    }

    // Lossless resonant Jaynes-Cummings from |0, e>.
    {
        const double g = 0.015;
        const SpaceLayout layout = make_space({Subsystem::fock(4), Subsystem::qubit()});
        const QubitOps q = qubit_ops(layout, 1);
        const Operator b = destroy(layout, 0);
        LindbladModel m;
        m.layout = layout;
        m.H = number(layout, 0) + 0.5 * q.sigma_z + g * (b.adjoint() * q.sigma_minus + b * q.sigma_plus);
        const double period = kPi / g;
        const auto times = linspace(0.0, 10.0 * period, 4001);
        const std::vector<std::size_t> levels{0, 0};
        EvolveOptions eo;
        eo.rtol = 1e-11;
        eo.atol = 1e-13;
        const TimeSeries ts =
            evolve_expectations(m, basis_state(layout, levels), times, {q.sigma_plus * q.sigma_minus}, {}, eo);
        note_drift(ts.trace_drift, "A9 Rabi");
        std::vector<double> crossings;
        const auto& v = ts.values[0];
        for (std::size_t k = 1; k < v.size(); ++k) {
            const double a = v[k - 1].real() - 0.5;
            const double c = v[k].real() - 0.5;
            if ((a < 0.0) != (c < 0.0)) crossings.push_back(times[k - 1] + (times[k] - times[k - 1]) * a / (a - c));
        }
        double freq = 0.0;
        if (crossings.size() >= 2) {
            const double half_period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
            freq = kPi / half_period;
        }
        const double rel = std::abs(freq - 2.0 * g) / (2.0 * g);
        pass = pass && rel <= kA9RabiTol;
        detail += "Rabi " + fmt("%.8f", freq) + " vs 2g " + fmt("%.3f", 2.0 * g) + " (rel " + fmt("%.1e", rel) + "); ";
    }

    pass = pass && g_max_drift <= kTraceDriftMax;
    detail += "max trace drift " + fmt("%.2e", g_max_drift) + " (" + g_drift_source + ")";
    return {pass, detail};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
        {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9},
    };
    std::set<std::string> selected(argv + 1, argv + argc);

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        if (!selected.empty() && !selected.count(name)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%s %s  %s  [%.1f s]\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
