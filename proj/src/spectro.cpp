// spectro.cpp - spectral feature extraction and the lambda grid fit

#include "cqed/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "cqed/parallel.hpp"

namespace cqed {

namespace {

// Half-maximum crossing walking from index i in direction dir; NaN if the edge is reached.
double half_crossing(const std::vector<double>& x, const std::vector<double>& y, std::size_t i, double half, int dir)
{
    std::size_t j = i;
    while (true) {
        if (dir < 0 && j == 0) return std::numeric_limits<double>::quiet_NaN();
        if (dir > 0 && j + 1 == y.size()) return std::numeric_limits<double>::quiet_NaN();
        const std::size_t k = dir < 0 ? j - 1 : j + 1;
        if (y[k] < half) {
            const double f = (y[j] - half) / (y[j] - y[k]);
            return x[j] + f * (x[k] - x[j]);
        }
        j = k;
    }
}

std::vector<Peak> tallest(const PeakSet& set, std::size_t count)
{
    std::vector<Peak> p = set.peaks;
    std::stable_sort(p.begin(), p.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
    if (p.size() > count) p.resize(count);
    return p;
}

double mean_width(const PeakSet& set)
{
    const auto top = tallest(set, 2);
    double sum = 0.0;
    for (const auto& p : top) sum += p.fwhm;
    return sum / static_cast<double>(top.size());
}

void refuse_multipeak(const PeakSet& set, const char* which)
{
    double hmax = 0.0;
    for (const auto& p : set.peaks) hmax = std::max(hmax, p.height);
    std::size_t strong = 0;
    for (const auto& p : set.peaks) {
        if (p.height > 0.2 * hmax) ++strong;
    }
    if (strong > 2) {
        fail(ErrorKind::MultiPeak, std::string("normalized_linewidth: ") + which + " has " + std::to_string(strong) +
                                       " peaks above 20% of the maximum");
    }
}

double max_of(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    if (!(m > 0.0)) fail(ErrorKind::NoPeaks, "spectrum has no positive values");
    return m;
}

} // namespace

PeakSet find_peaks(const std::vector<double>& omegas, const std::vector<double>& values, double min_prominence)
{
    const std::size_t n = values.size();
    if (omegas.size() != n || n < 3) fail(ErrorKind::InvalidArgument, "find_peaks: need >= 3 matching samples");
    double vmax = -std::numeric_limits<double>::infinity();
    for (double v : values) vmax = std::max(vmax, v);
    if (!(vmax > 0.0)) fail(ErrorKind::NoPeaks, "find_peaks: spectrum has no positive values");

    PeakSet out;
    {
        std::vector<double> sorted = values;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 10), sorted.end());
        out.noise_floor = std::max(0.0, sorted[n / 10]);
    }
    const double h = omegas[1] - omegas[0];

    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(values[i] > values[i - 1])) continue;
        // plateau: take its left edge if it eventually descends
        std::size_t j = i;
        while (j + 1 < n && values[j + 1] == values[i]) ++j;
        if (j + 1 == n || !(values[j + 1] < values[i])) continue;

        double left_min = values[i];
        for (std::size_t k = i; k-- > 0;) {
            if (values[k] > values[i]) break;
            left_min = std::min(left_min, values[k]);
        }
        double right_min = values[i];
        for (std::size_t k = j + 1; k < n; ++k) {
            if (values[k] > values[i]) break;
            right_min = std::min(right_min, values[k]);
        }
        const double prominence = values[i] - std::max(left_min, right_min);
        if (prominence < min_prominence * vmax || values[i] <= out.noise_floor) continue;

        Peak p;
        const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        double delta = 0.0;
        if (j == i && denom < 0.0) delta = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
        p.omega = omegas[i] + delta * h;
        p.height = y1 - 0.25 * (y0 - y2) * delta;

        const double half = 0.5 * p.height;
        const double lo = half_crossing(omegas, values, i, half, -1);
        const double hi = half_crossing(omegas, values, j, half, +1);
        if (!std::isnan(lo) && !std::isnan(hi)) {
            p.fwhm = hi - lo;
        } else if (!std::isnan(lo)) {
            p.fwhm = 2.0 * (p.omega - lo);
        } else if (!std::isnan(hi)) {
            p.fwhm = 2.0 * (hi - p.omega);
        } else {
            p.fwhm = omegas.back() - omegas.front();
        }
        out.peaks.push_back(p);
        i = j;
    }
    if (out.peaks.empty()) fail(ErrorKind::NoPeaks, "find_peaks: no peak above the prominence threshold");
    return out;
}

PeakSet find_peaks(const Spectrum& spectrum, double min_prominence)
{
    return find_peaks(spectrum.omegas, spectrum.values, min_prominence);
}

double splitting(const PeakSet& peaks)
{
    if (peaks.peaks.size() < 2) {
        fail(ErrorKind::InsufficientPeaks, "splitting: " + std::to_string(peaks.peaks.size()) +
                                               " peak(s) found, two are needed");
    }
    const auto top = tallest(peaks, 2);
    return std::abs(top[1].omega - top[0].omega);
}

double normalized_linewidth(const Spectrum& spectrum, const Spectrum& reference, double min_prominence)
{
    const PeakSet a = find_peaks(spectrum, min_prominence);
    const PeakSet b = find_peaks(reference, min_prominence);
    refuse_multipeak(a, "spectrum");
    refuse_multipeak(b, "reference");
    return mean_width(a) / mean_width(b);
}

double normalized_l2(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) fail(ErrorKind::InvalidArgument, "normalized_l2: size mismatch");
    const double ma = max_of(a);
    const double mb = max_of(b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] / ma - b[i] / mb;
        sum += d * d;
    }
    return sum;
}

double normalized_l1(const std::vector<double>& omegas, const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size() || omegas.size() != a.size() || a.size() < 2) {
        fail(ErrorKind::InvalidArgument, "normalized_l1: size mismatch");
    }
    const double ma = max_of(a);
    const double mb = max_of(b);
    const double h = omegas[1] - omegas[0];
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] / ma - b[i] / mb);
    return sum * h;
}

FitResult fit_lambda(const Spectrum& target, const SystemParams& params, const std::vector<double>& grid,
                     const SpectrumOptions& opts, std::size_t workers)
{
    if (grid.empty()) fail(ErrorKind::InvalidArgument, "fit_lambda: empty grid");
    for (double l : grid) {
        if (!(l >= 0.0 && l <= 1.0)) fail(ErrorKind::InvalidArgument, "fit_lambda: grid values must lie in [0, 1]");
    }
    FitResult out;
    out.grid = grid;
    out.objectives.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> errors(grid.size());

    parallel_for(grid.size(), workers, [&](std::size_t i) {
        try {
            const LindbladModel model = build_fit_model(params, grid[i]);
            const Spectrum s = absorption_spectrum(model, target.omegas, opts);
            out.objectives[i] = normalized_l2(s.values, target.values);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::size_t best = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::isnan(out.objectives[i])) {
            ++out.failures;
            std::cerr << "warning: fit_lambda: lambda = " << grid[i] << " skipped: " << errors[i] << "\n";
            continue;
        }
        if (best == grid.size() || out.objectives[i] < out.objectives[best]) best = i;
    }
    if (2 * out.failures > grid.size() || best == grid.size()) {
        fail(ErrorKind::Convergence, "fit_lambda: " + std::to_string(out.failures) + " of " +
                                         std::to_string(grid.size()) + " grid points failed");
    }
    out.lambda_fit = grid[best];
    out.objective = out.objectives[best];
    return out;
}

} // namespace cqed
