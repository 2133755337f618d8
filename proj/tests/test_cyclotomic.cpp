#include "doctest.h"
#include "eisenstein/cyclotomic.hpp"
#include "eisenstein/error.hpp"
#include "helpers.hpp"

using namespace eis;
using testutil::q;

TEST_CASE("roots of unity") {
    for (int ell : {3, 5, 7, 11}) {
        auto z = CycloElement::zeta_power(ell, 1);
        auto zl = CycloElement::zeta_power(ell, ell - 1);
        CHECK(z * zl == CycloElement(ell, q(1)));
        CHECK(z * CycloElement(ell, q(1)) == z);
        CHECK(trace_to_Q(CycloElement(ell, q(1))) == ell - 1);
        CHECK(trace_to_Q(z) == -1);
        CHECK(cyclo_inv(z) == zl);
        CHECK(cyclo_inv(CycloElement(ell, q(1))) == CycloElement(ell, q(1)));
    }
    auto one = CycloElement(5, q(1));
    CycloElement prod = one;
    for (int k = 1; k < 5; ++k) prod = prod * (CycloElement::zeta_power(5, k) - one);
    CHECK(prod == CycloElement(5, q(5)));
    CHECK(trace_to_Q(CycloElement::zeta_power(5, 1) + CycloElement::zeta_power(5, 2)) == -2);
}

TEST_CASE("inverse of zeta - 1 for l = 3") {
    auto a = CycloElement::zeta_power(3, 1) - CycloElement(3, q(1));
    CHECK(cyclo_inv(a) == CycloElement(3, RatVec{q(-2, 3), q(-1, 3)}));
    CHECK_THROWS_AS(cyclo_inv(CycloElement(3, q(0))), Error);
    CHECK_THROWS_AS(CycloElement::zeta_power(3, 1) * CycloElement::zeta_power(5, 1), Error);
}

TEST_CASE("random field identities") {
    std::mt19937 g(3);
    for (int ell : {3, 5, 7}) {
        for (int t = 0; t < 30; ++t) {
            RatVec c(ell - 1), d(ell - 1);
            for (auto& x : c) x = testutil::rand_q(g);
            for (auto& x : d) x = testutil::rand_q(g);
            CycloElement a(ell, c), b(ell, d);
            if (!a.is_zero()) CHECK(a * cyclo_inv(a) == CycloElement(ell, q(1)));
            CHECK(trace_to_Q(a + b) == trace_to_Q(a) + trace_to_Q(b));
            CHECK(trace_to_Q(a * q(3, 2)) == trace_to_Q(a) * q(3, 2));
            for (int k = 1; k < ell; ++k) {
                CHECK(trace_to_Q(cyclo_conj(a, k)) == trace_to_Q(a));
                CHECK(cyclo_conj(a * b, k) == cyclo_conj(a, k) * cyclo_conj(b, k));
            }
            // trace equals the sum of the conjugates
            CycloElement s(ell, q(0));
            for (int k = 1; k < ell; ++k) s += cyclo_conj(a, k);
            CHECK(s == CycloElement(ell, trace_to_Q(a)));
        }
    }
}
