// slh.cpp - cascade composition of SLH triples

#include "cqed/slh.hpp"

namespace cqed::slh {

namespace {

bool is_identity(const Operator& op, double tol)
{
    const Operator diff = op - identity(op.layout());
    return diff.max_abs() <= tol;
}

} // namespace

SLHTriple make_triple(const Operator& jump, const Operator& hamiltonian)
{
    require_same_layout(jump.layout(), hamiltonian.layout(), "make_triple");
    SLHTriple g{{{identity(jump.layout())}}, {jump}, hamiltonian};
    validate(g);
    return g;
}

SLHTriple trivial_triple(const SpaceLayout& layout, std::size_t ports)
{
    SLHTriple g;
    g.S.assign(ports, std::vector<Operator>(ports, zero(layout)));
    for (std::size_t p = 0; p < ports; ++p) g.S[p][p] = identity(layout);
    g.L.assign(ports, zero(layout));
    g.H = zero(layout);
    return g;
}

void validate(const SLHTriple& g)
{
    const std::size_t n = g.L.size();
    if (n == 0) fail(ErrorKind::InvalidArgument, "SLH triple needs at least one port");
    if (g.S.size() != n) fail(ErrorKind::InvalidArgument, "SLH triple: S must be ports x ports");
    for (std::size_t i = 0; i < n; ++i) {
        if (g.S[i].size() != n) fail(ErrorKind::InvalidArgument, "SLH triple: S must be ports x ports");
        for (std::size_t j = 0; j < n; ++j) {
            require_same_layout(g.H.layout(), g.S[i][j].layout(), "SLH triple");
            const bool ok = (i == j) ? is_identity(g.S[i][j], 1e-12) : g.S[i][j].max_abs() <= 1e-12;
            if (!ok) {
                fail(ErrorKind::InvalidArgument,
                     "SLH triple: only identity scattering matrices are supported");
            }
        }
        require_same_layout(g.H.layout(), g.L[i].layout(), "SLH triple");
    }
    if (!g.H.is_hermitian(1e-10)) {
        fail(ErrorKind::NonHermitian, "SLH triple: Hamiltonian is not hermitian within 1e-10");
    }
}

SLHTriple series_product(const SLHTriple& first, const SLHTriple& second)
{
    validate(first);
    validate(second);
    require_same_layout(first.layout(), second.layout(), "series_product");
    if (first.ports() != second.ports()) {
        fail(ErrorKind::InvalidArgument, "series_product: port counts differ");
    }
    const std::size_t n = first.ports();
    const SpaceLayout& layout = first.layout();

    SLHTriple out;
    out.S.assign(n, std::vector<Operator>(n, zero(layout)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                out.S[i][j] += second.S[i][k] * first.S[k][j];
            }
        }
    }

    // S2 L1
    std::vector<Operator> s2_l1(n, zero(layout));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) s2_l1[i] += second.S[i][k] * first.L[k];
    }
    out.L.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.L.push_back(second.L[i] + s2_l1[i]);

    // (1/2i)(L2^dag S2 L1 - h.c.)
    Operator cross = zero(layout);
    for (std::size_t i = 0; i < n; ++i) cross += second.L[i].adjoint() * s2_l1[i];
    const Complex half_over_i(0.0, -0.5);
    Operator coupling = (cross - cross.adjoint()) * half_over_i;

    out.H = first.H + second.H + coupling;
    validate(out);
    return out;
}

} // namespace cqed::slh
