#include "doctest.h"
#include "eisenstein/dedekind.hpp"
#include "eisenstein/error.hpp"
#include "helpers.hpp"

#include <cstdio>
#include <map>

using namespace eis;
using testutil::imat;
using testutil::q;

namespace {

// Coset sum by box enumeration with deduplication of sigma^{-1} x mod Z^n,
// using representatives unrelated to the HNF ones.
Rational brute_d(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v, bool plus,
                 long shift_seed = 0) {
    int n = sigma.rows();
    Integer d = det(sigma);
    if (d == 0) return 0;
    long N = Integer(abs(d)).get_si();
    RatMatrix si = inverse(to_rat(sigma));
    std::map<RatVec, bool> seen;
    Rational total = 0;
    std::vector<long> x(n, 0);
    std::mt19937 g(static_cast<unsigned>(shift_seed));
    std::uniform_int_distribution<long> sh(-3, 3);
    while (true) {
        RatVec xv(n);
        for (int i = 0; i < n; ++i) xv[i] = Rational(x[i]);
        RatVec key = si * xv;
        for (auto& c : key) c = frac(c);
        if (!seen.count(key)) {
            seen[key] = true;
            // move the representative by a random lattice vector
            IntVec k(n);
            for (auto& c : k) c = shift_seed ? sh(g) : 0;
            IntVec off = sigma * k;
            RatVec t(n);
            for (int i = 0; i < n; ++i) t[i] = xv[i] + Rational(off[i]) + v[i];
            RatVec y = si * t;
            total += plus ? B_e_Q_plus(e, y, S) : B_e_Q(e, y, S);
        }
        int i = n - 1;
        while (i >= 0 && ++x[i] == N) x[i--] = 0;
        if (i < 0) break;
    }
    REQUIRE(static_cast<long>(seen.size()) == N);
    return total;
}

IntegerMatrix random_gamma_sigma(std::mt19937& g, int n, long ell) {
    std::uniform_int_distribution<long> ent(-4, 4);
    while (true) {
        IntegerMatrix s(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s(i, j) = (i == 0) ? ent(g) : ell * ent(g);
        bool ok = true;
        for (int j = 0; j < n; ++j) ok = ok && s(0, j) % ell != 0;
        if (ok && det(s) != 0) return s;
    }
}

SignMatrix random_signs(std::mt19937& g, int m, int n) {
    std::vector<int8_t> s;
    for (int i = 0; i < m * n; ++i) s.push_back(g() % 2 ? 1 : -1);
    return SignMatrix(m, n, s);
}

RatVec random_point(std::mt19937& g, int n, long den) {
    RatVec v(n);
    std::uniform_int_distribution<long> num(0, 3 * den);
    for (auto& c : v) c = q(num(g), den);
    return v;
}

} // namespace

TEST_CASE("d_plus examples") {
    auto Q = FormsMatrix::rational(to_rat(imat({{1, 1}})));
    CHECK(d_plus(imat({{1, 2}, {2, 4}}), {1, 1}, Q, {q(1, 3), q(1, 5)}) == 0);
    RatVec v{q(1, 3), q(2, 7)};
    CHECK(d_plus(IntegerMatrix::identity(2), {2, 1}, Q, v) == B_e_Q_plus({2, 1}, v, Q.signs()));
    auto sigma = imat({{2, 0}, {0, 1}});
    RatVec w{q(1, 3), q(1, 3)};
    Rational expect = B_e_Q_plus({2, 2}, {q(1, 6), q(1, 3)}, Q.signs()) + B_e_Q_plus({2, 2}, {q(2, 3), q(1, 3)}, Q.signs());
    CHECK(d_plus(sigma, {2, 2}, Q, w) == expect);
    CHECK(d_plus(sigma, {2, 2}, Q, w) == brute_d(sigma, {2, 2}, Q.signs(), w, true));
}

TEST_CASE("d sums are representative independent") {
    std::mt19937 g(21);
    for (int t = 0; t < 25; ++t) {
        int n = 2 + t % 2;
        std::uniform_int_distribution<long> ent(-3, 3);
        IntegerMatrix s(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s(i, j) = ent(g);
        if (det(s) == 0 || abs(det(s)) > 40) continue;
        ExponentTuple e(n);
        for (auto& x : e) x = 1 + static_cast<int>(g() % 3);
        auto S = random_signs(g, 1 + t % 3, n);
        auto v = random_point(g, n, 1 + t % 4);
        Rational a = d_sum(s, e, S, v);
        CHECK(a == brute_d(s, e, S, v, false, 0));
        CHECK(a == brute_d(s, e, S, v, false, 1 + t));
        CHECK(d_sum(s, e, S, v, true) == brute_d(s, e, S, v, true, 7 + t));
    }
}

TEST_CASE("smoothed sums agree with the restricted decomposition") {
    std::mt19937 g(33);
    for (int t = 0; t < 10; ++t) {
        long ell = (t % 2) ? 5 : 3;
        int n = 2 + (t % 3 == 2);
        auto s = random_gamma_sigma(g, n, ell);
        if (abs(det(s)) > 600) continue;
        ExponentTuple e(n, 1);
        if (t % 2) e[0] = 2;
        auto S = random_signs(g, 1 + t % 2, n);
        auto v = random_point(g, n, 1 + t % 3);
        Rational direct = d_ell_signs(s, e, S, v, ell);
        CHECK(direct == d_ell_decomposed(s, e, S, v, ell));
        if (e == ExponentTuple(n, 1)) CHECK(direct == d_ell_one_fast(s, S, v, ell));
    }
    CHECK_THROWS_AS(sigma_ell(imat({{1, 1}, {1, 5}}), 5), Error);
    CHECK_THROWS_AS(d_ell_signs(imat({{3}}), {1}, SignMatrix::from_rows({{1}}), {q(0)}, 5), Error);
}

TEST_CASE("fast smoothed sum covers integral points") {
    std::mt19937 g(5);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
        long ell = 7;
        auto s = random_gamma_sigma(g, 2, ell);
        auto S = random_signs(g, 2, 2);
        RatVec v{q(static_cast<long>(g() % 3)), q(static_cast<long>(g() % 2), 2)};
        if (abs(det(s)) > 2000) continue;
        CHECK(d_ell_one_fast(s, S, v, ell) == d_ell_signs(s, {1, 1}, S, v, ell));
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("restricted distributions") {
    std::mt19937 g(17);
    for (int t = 0; t < 40; ++t) {
        long ell = (t % 3 == 0) ? 3 : (t % 3 == 1 ? 5 : 7);
        int n = 2 + (t % 4 == 3);
        std::vector<long> a(n);
        for (auto& x : a) x = 1 + static_cast<long>(g() % (ell - 1));
        LinearFormModL L(ell, a);
        auto S = random_signs(g, 1 + t % 3, n);
        RatVec x = random_point(g, n, 1 + t % 5);
        if (t % 2) x[0] = q(static_cast<long>(g() % 9));
        long z = static_cast<long>(g() % ell);
        ExponentTuple one(n, 1);
        Rational d = b_L_z_direct(one, L, z, x, S);
        CHECK(d == b1_L_z_cyclo(L, z, x, S));
        CHECK(d == b1_L_z_fast(L, z, x, S));
        // periodic modulo l Z^n
        RatVec xs = x;
        xs[n - 1] += ell * static_cast<long>(g() % 3 + 1);
        CHECK(b_L_z_direct(one, L, z, xs, S) == d);
        // integrality: (1/m) Z[1/l], and (1/m) Z when l > n + 1
        Rational md = d * S.rows();
        CHECK(denominator_supported_on(md, {ell}));
        if (ell > n + 1) CHECK(is_integer(md));
    }
}

TEST_CASE("integrality sweep for b1") {
    std::mt19937 g(99);
    int n = 2;
    long ell = 7;
    for (int t = 0; t < 100; ++t) {
        std::vector<long> a{1 + static_cast<long>(g() % 6), 1 + static_cast<long>(g() % 6)};
        LinearFormModL L(ell, a);
        auto S = random_signs(g, 1 + t % 4, n);
        RatVec x = random_point(g, n, 1 + t % 6);
        Rational v = b1_L_z_fast(L, static_cast<long>(g() % ell), x, S);
        CHECK(is_integer(v * S.rows()));
    }
}

TEST_CASE("restricted distribution relation") {
    std::mt19937 g(41);
    long ell = 3;
    for (int t = 0; t < 6; ++t) {
        LinearFormModL L(ell, {1 + static_cast<long>(g() % 2), 1 + static_cast<long>(g() % 2)});
        auto S = random_signs(g, 2, 2);
        ExponentTuple e{1 + t % 2, 1};
        RatVec x = random_point(g, 2, 2);
        long z = static_cast<long>(g() % ell);
        for (long N : {2L, 4L}) {
            Rational s = 0;
            for (long k0 = 0; k0 < N; ++k0)
                for (long k1 = 0; k1 < N; ++k1) {
                    RatVec y{(x[0] + ell * k0) / N, (x[1] + ell * k1) / N};
                    s += b_L_z_direct(e, L, z, y, S);
                }
            CHECK(b_L_z_direct(e, L, N * z, x, S) == pow_q(Rational(N), weight(e) - 2) * s);
        }
    }
}

TEST_CASE("crucial congruence stabilizes") {
    // p^{M|r|} N(r+1)^{-1} b_{1+r}(x/p^M) - b_1(x/p^M) N x^r has valuation
    // >= M - eps with eps independent of M.
    long ell = 5, p = 3;
    LinearFormModL L(ell, {1, 2});
    auto S = SignMatrix::from_rows({{1, -1}});
    for (ExponentTuple r : {ExponentTuple{1, 0}, ExponentTuple{1, 1}, ExponentTuple{2, 0}, ExponentTuple{2, 3}}) {
        RatVec xs{q(7, 2), q(4, 5)};
        std::vector<long> eps;
        for (int M = 1; M <= 5; ++M) {
            Integer pm = pow_z(Integer(p), M);
            RatVec x{xs[0] / pm, xs[1] / pm};
            ExponentTuple e{1 + r[0], 1 + r[1]};
            Rational lhs = pow_q(Rational(pm), weight(r)) / ((r[0] + 1) * (r[1] + 1)) * b_L_z_direct(e, L, 2, x, S);
            Rational nx = pow_q(xs[0], r[0]) * pow_q(xs[1], r[1]);
            Rational rhs = b_L_z_direct({1, 1}, L, 2, x, S) * nx;
            Rational diff = lhs - rhs;
            if (diff == 0) continue; // valuation infinite
            eps.push_back(M - valuation(diff, Integer(p)));
        }
        MESSAGE("eps for r=(" << r[0] << "," << r[1] << "): " << [&] {
            std::string s;
            for (long x : eps) s += std::to_string(x) + " ";
            return s;
        }());
        for (long x : eps) CHECK(x <= 2);
    }
}

TEST_CASE("cyclotomic Dedekind sum") {
    CycloElement one3(3, q(1));
    CHECK(b1_exp(q(0), 1, 3) == cyclo_inv(CycloElement::zeta_power(3, 1) - one3) + one3 * q(1, 2));
    CHECK(b1_exp(q(1, 2), 2, 5) == cyclo_inv(CycloElement::zeta_power(5, 2) - CycloElement(5, q(1))));
    for (long ell : {3L, 5L, 7L})
        for (long r = 1; r < ell; ++r)
            for (Rational x : {q(0), q(1, 2), q(5, 3), q(-7, 4), q(3)}) CHECK(b1_exp(x, r, ell) == b1_exp_sum(x, r, ell));
    CHECK_THROWS_AS(b1_exp(q(0), 5, 5), Error);
    CHECK_THROWS_AS(LinearFormModL(5, {1, 10}), Error);
}

TEST_CASE("forms matrices") {
    auto F = NumberField::create(testutil::iv({-1, -1, 1}));
    auto t = F->theta();
    auto Q = FormsMatrix::embedded(F, {{F->one(), t}, {F->one(), t}}, {0, 1});
    auto S = Q.signs();
    CHECK(S(0, 1) == -1);
    CHECK(S(1, 1) == 1);
    CHECK(Q.negated().signs() == S.negated());
    CHECK(Q.scale_row(0, q(3)).signs() == S);
    // Q M^t: column j of the result is Q applied to row j of M
    auto R = Q.act(to_rat(imat({{1, 1}, {0, 1}})));
    CHECK(R.sign(0, 0) == F->sign_at(F->add(F->one(), t), 0));
    auto Z = FormsMatrix::rational(to_rat(imat({{1, -1}})));
    CHECK_THROWS_AS(Z.act(to_rat(imat({{1, 1}, {0, 1}}))).signs(), Error);
}

TEST_CASE("dedekind cache round trip") {
    DedekindCache c;
    auto S = SignMatrix::from_rows({{1, -1}});
    auto k = DedekindCache::key(imat({{1, 2}, {5, 0}}), {1, 2}, S, {q(4, 3), q(1, 2)}, 5, false);
    CHECK(k == DedekindCache::key(imat({{1, 2}, {5, 0}}), {1, 2}, S, {q(1, 3), q(-1, 2)}, 5, false));
    c.put(k, q(-7, 12));
    std::string path = "dedekind_cache_test.txt";
    c.save(path);
    DedekindCache d;
    d.load(path);
    CHECK(d.size() == 1);
    CHECK(d.get(k) == q(-7, 12));
    std::remove(path.c_str());
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("bogus\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(d.load(path), Error);
    std::remove(path.c_str());
}
