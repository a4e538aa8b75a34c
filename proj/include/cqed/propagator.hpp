// propagator.hpp - reduced models of t -> w^H e^{tL} y for long correlation windows
//
// Small Liouvillians are handled exactly (dense eigendecomposition). Larger ones
// are projected onto a shift-and-invert Krylov space built from a single sparse
// LU of (L - z0), with z0 placed next to the frequency window of interest, and
// the basis is enlarged until the window response stops changing.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqed/hilbert.hpp"

namespace cqed {

struct ReducedOptions {
    std::size_t exact_limit{400};   // dense path when dim(L) <= exact_limit
    std::size_t block{40};          // basis growth between convergence checks
    std::size_t max_dim{800};
    double tol{1e-4};               // relative change of the probe response between checks
    std::optional<Complex> shift;   // override for z0
};

struct ReducedDiagnostics {
    std::string method;             // "exact" or "krylov"
    std::size_t basis_dim{0};
    double trace_drift{0.0};        // max |Tr(e^{tL} y) - Tr(y)| over the evaluated times
    double last_change{0.0};        // relative change at the final convergence check
    bool modal{true};               // false when the stepping fallback was used
};

class ReducedPropagator {
public:
    // `probe_omegas` (may be empty) are frequencies whose response
    //   -w_0^H (L + i omega)^{-1} y
    // must be converged; when empty, convergence is judged on a default
    // frequency window around `omega_center`.
    ReducedPropagator(const SparseMatrix& L, const Vector& y, std::span<const Vector> functionals,
                      double omega_center, std::span<const double> probe_omegas,
                      const ReducedOptions& opts = {});

    // values[i][k] = w_i^H e^{t_k L} y
    std::vector<std::vector<Complex>> evaluate(std::span<const double> times) const;
    // Faster path for t_k = k dt, k < n.
    std::vector<std::vector<Complex>> evaluate_uniform(double dt, std::size_t n) const;

    // -w_0^H (L_m + i omega)^{-1} y_m, the reduced counterpart of the probe response.
    std::vector<Complex> response(std::span<const double> omegas) const;

    const ReducedDiagnostics& diagnostics() const noexcept { return diag_; }

private:
    void build_modal();
    std::vector<std::vector<Complex>> evaluate_stepping(std::span<const double> times) const;

    DenseMatrix Lm_;            // projected generator
    Vector ym_;                 // projected start vector
    DenseMatrix Wm_;            // projected functionals, one column each, trace functional last
    Complex trace_y_{0.0};
    // modal form: value_i(t) = sum_k left(i,k) right(k) e^{lambda_k t}
    Vector lambda_;
    DenseMatrix left_;
    Vector right_;
    mutable ReducedDiagnostics diag_;
};

} // namespace cqed
