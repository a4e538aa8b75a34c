#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "cqed/model.hpp"
#include "cqed/slh.hpp"

using namespace cqed;
using namespace cqed::test;

namespace {

slh::SLHTriple random_triple(const SpaceLayout& layout, std::mt19937_64& rng)
{
    const Operator h = random_operator(layout, rng);
    return slh::make_triple(random_operator(layout, rng), h + h.adjoint());
}

double distance(const Operator& a, const Operator& b) { return max_abs(DenseMatrix((a - b).data())); }

} // namespace

TEST_SUITE("slh") {

TEST_CASE("identity element")
{
    std::mt19937_64 rng(1);
    const auto layout = make_space({Subsystem::fock(3), Subsystem::qubit()});
    const slh::SLHTriple g = random_triple(layout, rng);
    const slh::SLHTriple e = slh::trivial_triple(layout);
    for (const auto& out : {slh::series_product(g, e), slh::series_product(e, g)}) {
        CHECK(distance(out.H, g.H) < 1e-14);
        CHECK(distance(out.L[0], g.L[0]) < 1e-14);
    }
}

TEST_CASE("cascade of two cavities gains the directional coupling")
{
    const auto layout = make_space({Subsystem::fock(3), Subsystem::fock(3)});
    const Operator a = destroy(layout, 0);
    const Operator b = destroy(layout, 1);
    const double ka = 1.3;
    const double kb = 0.2;
    const slh::SLHTriple g = slh::series_product(slh::make_triple(std::sqrt(ka) * a, zero(layout)),
                                                 slh::make_triple(std::sqrt(kb) * b, zero(layout)));
    const Operator expected = (std::sqrt(ka * kb) / Complex(0.0, 2.0)) * (b.adjoint() * a - a.adjoint() * b);
    CHECK(distance(g.H, expected) < 1e-14);
    CHECK(distance(g.L[0], std::sqrt(ka) * a + std::sqrt(kb) * b) < 1e-14);

    const Operator anti = b.adjoint() * a - a.adjoint() * b;
    CHECK(distance(anti.adjoint(), -anti) < 1e-14);
    CHECK(g.H.is_hermitian());
}

TEST_CASE("property: composed H is hermitian and the product is associative")
{
    std::mt19937_64 rng(2);
    const auto layout = make_space({Subsystem::fock(2), Subsystem::qubit()});
    for (int trial = 0; trial < 10; ++trial) {
        const auto g1 = random_triple(layout, rng);
        const auto g2 = random_triple(layout, rng);
        const auto g3 = random_triple(layout, rng);
        const auto left = slh::series_product(slh::series_product(g1, g2), g3);
        const auto right = slh::series_product(g1, slh::series_product(g2, g3));
        CHECK(left.H.is_hermitian());
        CHECK(distance(left.H, right.H) < 1e-10);
        CHECK(distance(left.L[0], right.L[0]) < 1e-10);
    }
}

TEST_CASE("cascade differs from independent dissipators by the interference terms")
{
    const auto layout = make_space({Subsystem::fock(3), Subsystem::fock(3)});
    const Operator a = destroy(layout, 0);
    const Operator b = destroy(layout, 1);
    auto difference = [&](double ka, double kb) {
        const LindbladModel m = to_lindblad(slh::series_product(slh::make_triple(std::sqrt(ka) * a, zero(layout)),
                                                                slh::make_triple(std::sqrt(kb) * b, zero(layout))),
                                            {});
        const SparseMatrix separate =
            liouvillian(zero(layout), {std::sqrt(ka) * a, std::sqrt(kb) * b}).data;
        return max_abs(DenseMatrix(m.liouvillian().data - separate));
    };
    CHECK(difference(1.0, 0.5) > 1e-3);
    CHECK(difference(1.0, 0.0) < 1e-14);
    CHECK(difference(0.0, 0.5) < 1e-14);
}

TEST_CASE("to_lindblad collects extra collapse operators")
{
    const auto layout = make_space({Subsystem::fock(3), Subsystem::fock(3), Subsystem::qubit()});
    const Operator a = destroy(layout, 0);
    const Operator b = destroy(layout, 1);
    const QubitOps q = qubit_ops(layout, 2);
    const auto g = slh::series_product(slh::make_triple(a, zero(layout)), slh::make_triple(0.3 * b, zero(layout)));

    const LindbladModel plain = to_lindblad(g, {});
    REQUIRE(plain.collapse.size() == 1);
    CHECK(distance(plain.collapse[0], a + 0.3 * b) < 1e-14);

    const LindbladModel full = to_lindblad(g, {0.1 * a, 0.1 * b, 0.03 * q.sigma_minus});
    CHECK(full.collapse.size() == 4);

    const auto other = make_space({Subsystem::fock(2)});
    CHECK_THROWS_AS(to_lindblad(g, {destroy(other, 0)}), Error);
}

TEST_CASE("validation errors")
{
    const auto layout = make_space({Subsystem::fock(3)});
    const auto other = make_space({Subsystem::fock(4)});
    const Operator a = destroy(layout, 0);

    slh::SLHTriple bad_s = slh::make_triple(a, zero(layout));
    bad_s.S[0][0] = 2.0 * identity(layout);
    CHECK_THROWS_AS(slh::validate(bad_s), Error);

    slh::SLHTriple bad_h = slh::make_triple(a, zero(layout));
    bad_h.H = a;
    try {
        slh::validate(bad_h);
        FAIL("expected non-hermitian error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonHermitian);
    }

    const auto two_ports = slh::trivial_triple(layout, 2);
    CHECK_THROWS_AS(slh::series_product(slh::make_triple(a, zero(layout)), two_ports), Error);
    CHECK_THROWS_AS(slh::series_product(slh::make_triple(a, zero(layout)),
                                        slh::make_triple(destroy(other, 0), zero(other))),
                    Error);
}

}
