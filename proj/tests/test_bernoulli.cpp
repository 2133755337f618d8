#include "doctest.h"
#include "eisenstein/bernoulli.hpp"
#include "eisenstein/error.hpp"
#include "helpers.hpp"

#include <thread>

using namespace eis;
using testutil::q;

namespace {

// Taylor-division oracle: b_k(x) = k! [t^k] e^{xt} * t/(e^t - 1).
Rational bernoulli_oracle(int k, const Rational& x) {
    RatVec ex(k + 1), td(k + 1), inv(k + 1);
    Rational p = 1;
    for (int i = 0; i <= k; ++i) {
        ex[i] = p / Rational(factorial(i));
        p *= x;
        td[i] = Rational(1) / Rational(factorial(i + 1)); // (e^t - 1)/t
    }
    for (int i = 0; i <= k; ++i) {
        Rational s = i == 0 ? Rational(1) : Rational(0);
        for (int j = 1; j <= i; ++j) s -= td[j] * inv[i - j];
        inv[i] = s;
    }
    Rational c = 0;
    for (int i = 0; i <= k; ++i) c += ex[i] * inv[k - i];
    return c * Rational(factorial(k));
}

} // namespace

TEST_CASE("bernoulli polynomials") {
    CHECK(bernoulli_poly(0) == MultiPoly::constant(1, 1));
    auto x = MultiPoly::variable(1, 0);
    CHECK(bernoulli_poly(1) == x - MultiPoly::constant(1, q(1, 2)));
    CHECK(bernoulli_poly(2) == x * x - x + MultiPoly::constant(1, q(1, 6)));
    CHECK(bernoulli_number(4) == q(-1, 30));
    CHECK(bernoulli_number(12) == q(-691, 2730));
    for (int k = 0; k < 14; ++k)
        for (Rational xv : {q(0), q(1, 3), q(-5, 7), q(9, 4)})
            CHECK(bernoulli_poly(k).evaluate({xv}) == bernoulli_oracle(k, xv));
    // leading terms x^k - (k/2) x^{k-1}
    for (int k = 2; k < 10; ++k) {
        auto p = bernoulli_poly(k);
        CHECK(p.coeff({k}) == 1);
        CHECK(p.coeff({k - 1}) == q(-k, 2));
    }
}

TEST_CASE("periodic Bernoulli functions") {
    CHECK(periodic_B(1, q(0)) == 0);
    CHECK(periodic_B(1, q(1, 3)) == q(-1, 6));
    CHECK(periodic_B(2, q(7, 2)) == q(-1, 12));
    std::mt19937 g(5);
    for (int t = 0; t < 100; ++t) {
        Rational x = testutil::rand_q(g);
        for (int k = 0; k < 6; ++k) CHECK(periodic_B(k, x + 1) == periodic_B(k, x));
    }
}

TEST_CASE("B_e and its Q-corrections") {
    CHECK(B_e({1, 1}, {q(1, 3), q(1, 3)}) == q(1, 36));
    CHECK(B_e({1, 3}, {q(2), q(1, 5)}) == 0);
    CHECK(B_e({2}, {q(0)}) == q(1, 6));
    auto S1 = SignMatrix::from_rows({{1, 1}});
    CHECK(B_e_Q({1, 1}, {q(0), q(0)}, S1) == q(1, 4));
    auto S2 = SignMatrix::from_rows({{1, 1}, {-1, 1}});
    CHECK(B_e_Q({1, 1}, {q(0), q(1, 3)}, S2) == 0);
    CHECK(B_e_Q({2, 1}, {q(1, 5), q(1, 3)}, S2) == B_e({2, 1}, {q(1, 5), q(1, 3)}));
    auto S3 = SignMatrix::from_rows({{1, -1}});
    CHECK(B_e_Q_plus({1, 1}, {q(0), q(0)}, S3) == q(-1, 4));
    CHECK(B_e_Q_plus({1, 2}, {q(0), q(1, 3)}, S3) == 0);
    CHECK(B_e_Q_plus({2, 2}, {q(1, 4), q(1, 3)}, S3) == B_e({2, 2}, {q(1, 4), q(1, 3)}));
    CHECK_THROWS_AS(SignMatrix::from_rows({{1, 0}}), Error);
}

TEST_CASE("distribution relations") {
    std::mt19937 g(9);
    std::vector<SignMatrix> signs{SignMatrix::from_rows({{1, -1}}), SignMatrix::from_rows({{1, 1}, {-1, 1}, {1, -1}})};
    for (int t = 0; t < 30; ++t) {
        ExponentTuple e{1 + t % 2, 1 + (t / 2) % 3};
        RatVec x{testutil::rand_q(g, 4), testutil::rand_q(g, 4)};
        if (t % 3 == 0) x[0] = q(t % 5);
        for (int N : {2, 3, 5}) {
            Rational scale = pow_q(Rational(N), weight(e) - 2);
            Rational s = 0, sq = 0, sp = 0;
            const auto& S = signs[t % 2];
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) {
                    RatVec y{(x[0] + a) / N, (x[1] + b) / N};
                    s += B_e(e, y);
                    sq += B_e_Q(e, y, S);
                    sp += B_e_Q_plus(e, y, S);
                }
            CHECK(B_e(e, x) == scale * s);
            CHECK(B_e_Q(e, x, S) == scale * sq);
            CHECK(B_e_Q_plus(e, x, S) == scale * sp);
            CHECK(B_e_Q_plus(e, x, S) == B_e_Q_plus(e, x, S.negated()));
        }
    }
}

TEST_CASE("bernoulli memo is shareable across threads") {
    std::vector<std::thread> ts;
    std::vector<Rational> out(4);
    for (int i = 0; i < 4; ++i) ts.emplace_back([&, i] { out[i] = bernoulli_number(30 + 2 * i); });
    for (auto& t : ts) t.join();
    CHECK(out[0] == bernoulli_number(30));
    CHECK(out[0] == q(8615841276005LL, 14322));
}
