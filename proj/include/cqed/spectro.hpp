// spectro.hpp - peak finding, splitting, linewidth ratios and the lambda fit

#pragma once

#include <vector>

#include "cqed/evolve.hpp"

namespace cqed {

struct Peak {
    double omega{0.0};
    double height{0.0};
    double fwhm{0.0};
};

struct PeakSet {
    std::vector<Peak> peaks;   // sorted by omega
    double noise_floor{0.0};
};

// Local maxima whose topographic prominence is at least min_prominence * max(values).
// Throws NoPeaks when nothing qualifies.
PeakSet find_peaks(const std::vector<double>& omegas, const std::vector<double>& values,
                   double min_prominence = 0.05);
PeakSet find_peaks(const Spectrum& spectrum, double min_prominence = 0.05);

// Distance between the two tallest peaks; throws InsufficientPeaks below two.
double splitting(const PeakSet& peaks);

// Mean FWHM of the (up to) two tallest peaks over the same quantity of the
// reference. Throws MultiPeak when more than two peaks exceed 20% of the maximum.
double normalized_linewidth(const Spectrum& spectrum, const Spectrum& reference,
                            double min_prominence = 0.05);

// Sum of squared differences of the peak-normalized spectra.
double normalized_l2(const std::vector<double>& a, const std::vector<double>& b);
// Integral of |a/max a - b/max b| over the (uniform) grid.
double normalized_l1(const std::vector<double>& omegas, const std::vector<double>& a,
                     const std::vector<double>& b);

struct FitResult {
    double lambda_fit{0.0};
    double objective{0.0};
    std::vector<double> grid;
    std::vector<double> objectives;   // NaN where the grid point failed
    std::size_t failures{0};
};

FitResult fit_lambda(const Spectrum& target, const SystemParams& params, const std::vector<double>& grid,
                     const SpectrumOptions& opts = {}, std::size_t workers = 1);

} // namespace cqed
