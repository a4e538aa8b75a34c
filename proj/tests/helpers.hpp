// helpers.hpp - shared fixtures for unit tests

#pragma once

#include <random>
#include <vector>

#include "cqed/hilbert.hpp"

namespace cqed::test {

inline DenseMatrix random_hermitian(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> d;
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
    return 0.5 * (m + m.adjoint());
}

inline DenseMatrix random_density(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> d;
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
    DenseMatrix rho = m * m.adjoint();
    return rho / rho.trace();
}

inline Operator random_operator(const SpaceLayout& layout, std::mt19937_64& rng, double density = 0.3)
{
    std::uniform_real_distribution<double> u;
    std::normal_distribution<double> d;
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    std::vector<Eigen::Triplet<Complex>> t;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (u(rng) < density) t.emplace_back(i, j, Complex(d(rng), d(rng)));
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return Operator(layout, m);
}

inline std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

inline double max_abs(const DenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace cqed::test
