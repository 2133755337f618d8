#include "doctest.h"
#include "eisenstein/error.hpp"
#include "eisenstein/numberfield.hpp"

using namespace eis;

namespace {
IntVec iv(std::initializer_list<long> xs) {
    IntVec v;
    for (long x : xs) v.emplace_back(x);
    return v;
}
} // namespace

TEST_CASE("golden field basics") {
    auto F = NumberField::create(iv({-1, -1, 1}));
    CHECK(F->degree() == 2);
    CHECK(F->index() == 1);
    CHECK(F->discriminant() == 5);
    auto t = F->theta();
    CHECK(F->trace(t) == 1);
    CHECK(F->norm(t) == -1);
    CHECK(F->mul(t, t) == F->add(t, F->one()));
    CHECK(F->sign_at(t, 0) == -1);
    CHECK(F->sign_at(t, 1) == 1);
    auto inv = F->inv(F->from_ints({2, 3}));
    CHECK(F->mul(inv, F->from_ints({2, 3})) == F->one());
    auto eps = fundamental_unit_quadratic(F);
    CHECK(eps == t);
}

TEST_CASE("maximal order enlarges Z[sqrt5]") {
    auto F = NumberField::create(iv({-5, 0, 1}));
    CHECK(F->index() == 2);
    CHECK(F->discriminant() == 5);
    auto half = F->from_coords({Rational(1, 2), Rational(1, 2)});
    CHECK(F->is_algebraic_integer(half));
    CHECK(Ideal::unit(F).contains(half));
}

TEST_CASE("ideal arithmetic") {
    auto F = NumberField::create(iv({-1, -1, 1}));
    auto c = prime_over(F, 11);
    CHECK(c.norm() == 11);
    auto O = Ideal::unit(F);
    CHECK(c * c.inverse() == O);
    CHECK((c * c).norm() == 121);
    auto ps = primes_above(F, 11);
    CHECK(ps.size() == 2);
    auto p3 = primes_above(F, 3);
    CHECK(p3.size() == 1);
    CHECK(p3[0].f == 2);
    auto p5 = primes_above(F, 5);
    CHECK(p5.size() == 1);
    CHECK(p5[0].e == 2);
    CHECK(is_coprime(ps[0].P, ps[1].P));
}

TEST_CASE("generator and units") {
    auto F = NumberField::create(iv({-1, -1, 1}));
    auto c = prime_over(F, 11);
    auto O = Ideal::unit(F);
    auto g = totally_positive_generator(c, O, 4);
    CHECK(g.e == 1);
    CHECK(Ideal::principal(F, g.pi) == c);
    CHECK(F->sign_at(g.pi, 0) == 1);
    CHECK(F->sign_at(g.pi, 1) == 1);
    auto u = unit_basis(F, O);
    CHECK(u.eps.size() == 1);
    CHECK(u.eps[0] == F->add(F->theta(), F->one()));
    CHECK(u.sign_det_R == -1);
}

TEST_CASE("adapted basis") {
    auto F = NumberField::create(iv({-1, -1, 1}));
    auto c = prime_over(F, 11);
    auto O = Ideal::unit(F);
    auto w = adapted_basis(O, O, c, 11);
    CHECK(w.size() == 2);
    CHECK(sign_det_embeddings(*F, w) != 0);
}

TEST_CASE("cubic field of conductor 9") {
    auto F = NumberField::create(iv({-1, -3, 0, 1}));
    CHECK(F->index() == 1);
    CHECK(F->discriminant() == 81);
    auto t = F->theta();
    auto e1 = F->mul(t, t);
    auto t1 = F->add(t, F->one());
    auto e2 = F->mul(t1, t1);
    auto u = unit_basis(F, Ideal::unit(F), std::vector<FieldElement>{e1, e2});
    CHECK(std::abs(u.sign_det_R) == 1);
    CHECK_THROWS_AS(NumberField::create(iv({-2, 0, 0, 1})), Error);          // not totally real
    CHECK_THROWS_AS(NumberField::create(iv({0, -1, 0, 1})), Error);          // reducible
}

TEST_CASE("quartic irreducibility certificate") {
    // x^4 - 4x^2 + 2: totally real and Eisenstein at 2
    auto F = NumberField::create(iv({2, 0, -4, 0, 1}));
    CHECK(F->degree() == 4);
    // (x^2-2)(x^2-3) is rejected
    CHECK_THROWS_AS(NumberField::create(iv({6, 0, -5, 0, 1})), Error);
}
