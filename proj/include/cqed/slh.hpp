// slh.hpp - SLH triples and cascade composition
//
// Only identity scattering matrices are supported: every port is a shared
// waveguide channel with no beam-splitter mixing.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "cqed/hilbert.hpp"

namespace cqed::slh {

struct SLHTriple {
    std::vector<std::vector<Operator>> S;  // ports x ports, must equal identity
    std::vector<Operator> L;               // one jump operator per port
    Operator H;

    std::size_t ports() const noexcept { return L.size(); }
    const SpaceLayout& layout() const { return H.layout(); }
};

// Single-port triple (I, L, H).
SLHTriple make_triple(const Operator& jump, const Operator& hamiltonian);
// Identity element (I, 0, 0) with `ports` ports.
SLHTriple trivial_triple(const SpaceLayout& layout, std::size_t ports = 1);

void validate(const SLHTriple& g);

// Feeds the output of `first` into `second`:
//   (S2 S1, L2 + S2 L1, H1 + H2 + (1/2i)(L2^dag S2 L1 - L1^dag S2^dag L2)).
SLHTriple series_product(const SLHTriple& first, const SLHTriple& second);

} // namespace cqed::slh
