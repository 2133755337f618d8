#include "checks.hpp"

#include "eisenstein/cocycle.hpp"
#include "eisenstein/dedekind.hpp"
#include "eisenstein/error.hpp"
#include "eisenstein/padic.hpp"
#include "eisenstein/zeta.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>
#include <sstream>

namespace eis::checks {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Fills seconds and applies the runtime bound (full mode only).
CheckResult timed(int id, std::string name, double limit, const CheckOptions& o,
                  const std::function<bool(std::ostringstream&)>& body) {
    CheckResult r;
    r.id = id;
    r.name = std::move(name);
    r.limit_seconds = o.quick ? 0 : limit;
    std::ostringstream detail;
    auto t0 = Clock::now();
    try {
        r.pass = body(detail);
    } catch (const std::exception& e) {
        r.pass = false;
        detail << "exception: " << e.what();
    }
    r.seconds = since(t0);
    if (r.limit_seconds > 0 && r.seconds > r.limit_seconds) {
        r.pass = false;
        detail << " [over the " << r.limit_seconds << " s bound]";
    }
    r.detail = detail.str();
    return r;
}

IntVec ivec(std::initializer_list<long> xs) {
    IntVec v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

FieldPtr field(std::initializer_list<long> coeffs) { return NumberField::create(ivec(coeffs)); }

Ideal prime_ideal(const FieldPtr& F, long ell, long root) {
    return Ideal::from_two_generators(F, Integer(ell), F->sub(F->theta(), F->from_rational(Rational(root))));
}

// Integral matrix in Gamma_l with small entries.
IntegerMatrix random_gamma(std::mt19937& g, int n, long ell, long span) {
    std::uniform_int_distribution<long> u(-span, span);
    std::uniform_int_distribution<long> k(-2, 2);
    while (true) {
        IntegerMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = u(g);
        for (int i = 1; i < n; ++i) m(i, 0) = ell * k(g);
        Integer d = det(m);
        if (d != 0 && !mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(ell))) return m;
    }
}

GammaEllMatrix ge(const IntegerMatrix& m, long ell) { return GammaEllMatrix::integral(m, ell); }

// Single form (1, theta, ..., theta^{n-1}) at the largest real embedding of
// a totally real field of degree n.
FormsMatrix power_form(const FieldPtr& F) {
    std::vector<FieldElement> row;
    FieldElement x = F->one();
    for (int i = 0; i < F->degree(); ++i) {
        row.push_back(x);
        x = F->mul(x, F->theta());
    }
    return FormsMatrix::embedded(F, {row}, {F->degree() - 1});
}

FieldPtr sqrt2() {
    static FieldPtr F = field({-2, 0, 1});
    return F;
}
FieldPtr cubic9() {
    static FieldPtr F = field({-1, -3, 0, 1});
    return F;
}
FieldPtr golden() {
    static FieldPtr F = field({-5, 0, 1});
    return F;
}

RatVec random_v(std::mt19937& g, int n, long maxden = 9) {
    std::uniform_int_distribution<long> den(1, maxden);
    RatVec v(n);
    for (auto& c : v) {
        long d = den(g);
        std::uniform_int_distribution<long> num(-d, d);
        c = ratio(Integer(num(g)), Integer(d));
    }
    return v;
}

MultiPoly quadratic(long a, long b, long c) {
    MultiPoly P(2);
    P.add_term({2, 0}, Rational(a));
    P.add_term({1, 1}, Rational(b));
    P.add_term({0, 2}, Rational(c));
    return P;
}

long padic_gap(const PadicInt& x, const Rational& exact) {
    return (x - PadicInt::from_rational(exact, x.p(), x.precision())).valuation();
}

} // namespace

Rational siegel_zeta(long D, int k) {
    if (k != 1 && k != 3) fail(Errc::Unsupported, "Siegel formula implemented for k = 1, 3");
    Integer s = 0;
    for (long b = -D; b <= D; ++b) {
        if (b * b >= D || ((b - D) % 2) != 0) continue;
        long m = (D - b * b) / 4;
        for (long d = 1; d <= m; ++d)
            if (m % d == 0) s += pow_z(Integer(d), static_cast<unsigned long>(k));
    }
    return k == 1 ? Rational(s) / 60 : Rational(s) / 120;
}

CheckResult exact_zeta_values(const CheckOptions& o) {
    return timed(1, "exact smoothed zeta values", 20, o, [&](std::ostringstream& d) {
        struct Case {
            FieldPtr F;
            long D, ell, root;
        };
        bool ok = true;
        for (const Case& c : {Case{golden(), 5, 11, 4}, Case{sqrt2(), 8, 7, 3}}) {
            auto t0 = Clock::now();
            Ideal O = Ideal::unit(c.F);
            ZetaData Z = build_zeta_data(c.F, O, O, prime_ideal(c.F, c.ell, c.root), c.ell, unit_basis(c.F, O));
            ZetaResult r = zeta_minus_k_detailed(Z, 1);
            double t = since(t0);
            Rational oracle = Rational(1 - c.ell * c.ell) * siegel_zeta(c.D, 1);
            bool here = r.value == -4 && r.value == oracle && r.crosschecked && (o.quick || t < 10);
            d << "D=" << c.D << ": " << to_string(r.value) << " (oracle " << to_string(oracle) << ", " << t << " s) ";
            ok = ok && here;
        }
        return ok;
    });
}

CheckResult integrality_sweep(const CheckOptions& o) {
    return timed(2, "integrality of Psi_l(A, 1, Q, v)", 120, o, [&](std::ostringstream& d) {
        std::mt19937 g(2024);
        const int total = o.quick ? 40 : 200;
        const long ells[] = {3, 5, 7, 11};
        int done = 0, bad = 0, termwise = 0, termwise_bad = 0;
        for (int t = 0; t < total; ++t) {
            long ell = ells[t % 4];
            int n = (t / 4) % 2 == 0 ? 2 : 3;
            FieldPtr F = n == 2 ? sqrt2() : cubic9();
            FormsMatrix Q = power_form(F);
            CocycleTuple A;
            for (int i = 0; i < n; ++i) A.push_back(ge(random_gamma(g, n, ell, n == 2 ? 5 : 2), ell));
            RatVec v = random_v(g, n);
            Rational val = psi_ell(A, {MultiPoly::constant(n, 1), Q, v}, ell);
            ++done;
            if (!denominator_supported_on(val, {ell})) ++bad;
            if (ell <= n + 1) continue;
            // termwise: b_1^{L,z}(x, S) for the form L and signs S of this tuple
            IntegerMatrix sigma = sigma_of_tuple(A);
            if (det(sigma) == 0) continue;
            std::vector<long> a(n);
            bool nonzero = true;
            for (int j = 0; j < n; ++j) {
                a[j] = Integer(mod_pos(sigma(0, j), Integer(ell))).get_si();
                nonzero = nonzero && a[j] != 0;
            }
            if (!nonzero) continue;
            SignMatrix S = sign_of_inverse_action(sigma, Q);
            LinearFormModL L(ell, a);
            for (int s = 0; s < 3; ++s) {
                RatVec x = random_v(g, n, 6);
                if (s == 0) x[0] = Rational(static_cast<long>(g() % 3)); // an integral coordinate
                Rational b = b1_L_z_fast(L, static_cast<long>(g() % ell), x, S) * S.rows();
                ++termwise;
                if (!is_integer(b)) ++termwise_bad;
            }
        }
        d << done << " instances, " << bad << " with a denominator prime to l; " << termwise << " termwise values, "
          << termwise_bad << " non-integral";
        return done == total && bad == 0 && termwise > 0 && termwise_bad == 0;
    });
}

CheckResult cocycle_relations(const CheckOptions& o) {
    return timed(3, "cocycle relation and equivariance", 300, o, [&](std::ostringstream& d) {
        std::mt19937 g(77);
        const int triples = o.quick ? 10 : 50, quads = o.quick ? 3 : 20;
        const long ells[] = {3, 5, 7};
        int fails = 0, eq_fails = 0;
        for (int t = 0; t < triples; ++t) {
            long ell = ells[t % 3];
            FormsMatrix Q = power_form(sqrt2());
            std::vector<GammaEllMatrix> h;
            for (int i = 0; i < 3; ++i) h.push_back(ge(random_gamma(g, 2, ell, 4), ell));
            MultiPoly P = t % 2 == 0 ? MultiPoly::constant(2, 1) : quadratic(3, 1, -2);
            CocycleArgs args{P, Q, random_v(g, 2)};
            Rational s = psi_ell({h[1], h[2]}, args, ell) - psi_ell({h[0], h[2]}, args, ell) +
                         psi_ell({h[0], h[1]}, args, ell);
            if (s != 0) ++fails;
            IntegerMatrix gm = random_gamma(g, 2, ell, 3);
            Rational lhs = psi_ell(act_left(ge(gm, ell), {h[0], h[1]}), args, ell);
            Evaluator f = [&](const CocycleArgs& x) { return psi_ell({h[0], h[1]}, x, ell); };
            if (lhs != module_action(gm, f, args)) ++eq_fails;
        }
        for (int t = 0; t < quads; ++t) {
            long ell = ells[t % 2];
            FormsMatrix Q = power_form(cubic9());
            std::vector<GammaEllMatrix> h;
            for (int i = 0; i < 4; ++i) h.push_back(ge(random_gamma(g, 3, ell, 2), ell));
            CocycleArgs args{MultiPoly::constant(3, 1), Q, random_v(g, 3)};
            Rational s = 0;
            for (int i = 0; i < 4; ++i) {
                CocycleTuple A;
                for (int j = 0; j < 4; ++j)
                    if (j != i) A.push_back(h[j]);
                Rational val = psi_ell(A, args, ell);
                s += (i % 2 == 0) ? val : Rational(-val);
            }
            if (s != 0) ++fails;
            IntegerMatrix gm = random_gamma(g, 3, ell, 1);
            if (abs(det(gm)) > 12) continue;
            CocycleTuple A{h[0], h[1], h[2]};
            Rational lhs = psi_ell(act_left(ge(gm, ell), A), args, ell);
            Evaluator f = [&](const CocycleArgs& x) { return psi_ell(A, x, ell); };
            if (lhs != module_action(gm, f, args)) ++eq_fails;
        }
        d << triples << " triples, " << quads << " quadruples: " << fails << " cocycle failures, " << eq_fails
          << " equivariance failures";
        return fails == 0 && eq_fails == 0;
    });
}

CheckResult fast_path(const CheckOptions& o) {
    return timed(4, "cyclotomic fast path", 0, o, [&](std::ostringstream& d) {
        std::mt19937 g(4);
        const int total = o.quick ? 24 : 100;
        const long ells[] = {3, 5, 7};
        int mismatches = 0, integral_cases = 0;
        for (int t = 0; t < total; ++t) {
            long ell = ells[t % 3];
            int n = (t / 3) % 2 == 0 ? 2 : 3;
            std::vector<long> a(n);
            for (auto& x : a) x = 1 + static_cast<long>(g() % (ell - 1));
            LinearFormModL L(ell, a);
            int m = 1 + static_cast<int>(g() % 3);
            std::vector<int8_t> s;
            for (int i = 0; i < m * n; ++i) s.push_back(g() % 2 ? 1 : -1);
            SignMatrix S(m, n, s);
            RatVec x = random_v(g, n, 7);
            if (t % 4 == 0) {
                for (auto& c : x) c = Rational(static_cast<long>(g() % 5) - 2);
                ++integral_cases;
            } else if (t % 4 == 1) {
                x[0] = Rational(static_cast<long>(g() % 3));
                ++integral_cases;
            }
            long z = static_cast<long>(g() % ell);
            if (b1_L_z_fast(L, z, x, S) != b_L_z_direct(ExponentTuple(n, 1), L, z, x, S)) ++mismatches;
        }
        d << total << " inputs (" << integral_cases << " with integral coordinates), " << mismatches << " mismatches";
        if (o.quick) return mismatches == 0;

        // timing at l = 7, n = 3: one table per (L, S), many points, against
        // the direct restricted sum on the same points
        const long ell = 7;
        LinearFormModL L(ell, {1, 3, 5});
        SignMatrix S(2, 3, {1, -1, 1, -1, -1, 1});
        std::vector<RatVec> pts;
        for (int i = 0; i < 400; ++i) pts.push_back(random_v(g, 3, 11));
        auto t0 = Clock::now();
        Rational acc_direct = 0;
        for (size_t i = 0; i < pts.size(); ++i) acc_direct += b_L_z_direct({1, 1, 1}, L, static_cast<long>(i % ell), pts[i], S);
        double t_direct = since(t0);
        t0 = Clock::now();
        B1Table table(L, S);
        Rational acc_fast = 0;
        for (size_t i = 0; i < pts.size(); ++i) acc_fast += table.value(static_cast<long>(i % ell), pts[i]);
        double t_fast = since(t0);
        double speedup = t_direct / std::max(t_fast, 1e-9);
        d << "; l=7 n=3 speedup " << speedup << "x (" << t_direct << " s direct, " << t_fast << " s fast)";
        return mismatches == 0 && acc_fast == acc_direct && speedup >= 10;
    });
}

CheckResult measure_consistency(const CheckOptions& o) {
    const long eps = 1; // pinned tolerance
    return timed(5, "Riemann sums against exact integrals", 600, o, [&](std::ostringstream& d) {
        FieldPtr F = golden();
        Ideal O = Ideal::unit(F);
        MeasureHandle h = make_measure(F, O, O, prime_ideal(F, 11, 4), 11, unit_basis(F, O), 3);
        MultiPoly x = MultiPoly::variable(2, 0), y = MultiPoly::variable(2, 1);
        std::vector<MultiPoly> polys = {MultiPoly::constant(2, 1), x, x * y - y * y * Rational(2),
                                        x * x * x + y * Rational(5), x * x * y * y - y.pow(4) * Rational(3) + x};
        RiemannOptions opt;
        opt.threads = o.threads;
        long Mmax = o.quick ? 4 : 7;
        long worst = 0;
        bool ok = true;
        for (const auto& P : polys) {
            Rational exact = sublattice_exact(h, P, IntVec(2, Integer(0)), IntegerMatrix::identity(2));
            for (long M = 3; M <= Mmax; ++M) {
                PadicEstimate e = integrate_poly(h, P, M, opt);
                long gap = padic_gap(e.value, exact);
                worst = std::max(worst, M - gap);
                ok = ok && gap >= M - eps;
            }
        }
        d << polys.size() << " polynomials of degree <= 4, M = 3.." << Mmax << ": measured eps " << worst
          << " (pinned " << eps << ")";
        return ok;
    });
}

CheckResult interpolation(const CheckOptions& o) {
    const long eps = 1;
    return timed(6, "p-adic interpolation at p = 3", 900, o, [&](std::ostringstream& d) {
        FieldPtr F = golden();
        Ideal O = Ideal::unit(F);
        MeasureHandle h = make_measure(F, O, O, prime_ideal(F, 11, 4), 11, unit_basis(F, O), 3);
        Region R = region_build(h, RegionKind::UnitsF);
        RiemannOptions opt;
        opt.threads = o.threads;
        long M = o.quick ? 3 : 6;
        std::vector<long> ks = {0, 1, 2, 3, 4};
        auto est = padic_zeta_minus_k(h, R, ks, M, opt);
        long worst = 0;
        bool ok = true;
        for (size_t i = 0; i < ks.size(); ++i) {
            Rational exact = zeta_star_minus_k(h.Z, 3, ks[i]).value;
            long gap = padic_gap(est[i].value, exact);
            worst = std::max(worst, M - gap);
            ok = ok && gap >= M - eps;
            d << "k=" << ks[i] << ": v=" << gap << " ";
        }
        d << "(M=" << M << ", measured eps " << worst << ", pinned " << eps << ")";
        return ok;
    });
}

CheckResult order_of_vanishing(const CheckOptions& o) {
    const long eps = 1;
    return timed(7, "order of vanishing at p = 11", 1800, o, [&](std::ostringstream& d) {
        FieldPtr F = golden();
        Ideal O = Ideal::unit(F);
        MeasureHandle h = make_measure(F, O, O, prime_ideal(F, 19, 9), 19, unit_basis(F, O), 11);
        std::vector<PiData> pis;
        for (long s : {1L, -1L}) {
            FieldElement pi = F->add(F->from_rational(4), F->scale(F->theta(), s));
            pis.push_back(make_pi_data(Ideal::from_two_generators(F, Integer(11), pi), O, pi));
        }
        RiemannOptions opt;
        opt.threads = o.threads;
        std::vector<long> levels = o.quick ? std::vector<long>{2} : std::vector<long>{2, 3};
        bool ok = true;
        for (long M : levels) {
            auto est = oov_integral(h, pis, 2, M, opt);
            d << "M'=" << M << ":";
            for (long k = 0; k <= 2; ++k) {
                long cert = std::min(est[k].value.valuation(), est[k].certified);
                d << " k=" << k << " v>=" << cert;
                if (k < 2) ok = ok && cert >= M - eps;
            }
            d << " (k=2 reported only); ";
        }
        d << "pinned eps " << eps;
        return ok;
    });
}

CheckResult invariance(const CheckOptions& o) {
    return timed(8, "invariance of zeta values", 600, o, [&](std::ostringstream& d) {
        struct Case {
            FieldPtr F, G; // G: same field from a shifted generator
            long ell, root, root_G;
            FieldElement alpha;
        };
        FieldPtr F5 = golden(), F2 = sqrt2();
        // x^2 - x - 1 and x^2 - 2x - 1 generate the same fields; 11 divides N(theta - 4)
        // for the first and 7 divides N(theta - 4) for the second
        FieldPtr G5 = field({-1, -1, 1}), G2 = field({-1, -2, 1});
        std::vector<Case> cases = {
            {F5, G5, 11, 4, 4, F5->add(F5->from_rational(7), F5->scale(F5->theta(), 3))},
            {F2, G2, 7, 3, 4, F2->add(F2->from_rational(3), F2->theta())},
        };
        long kmax = o.quick ? 1 : 3;
        int variants = 0, fails = 0;
        for (const Case& c : cases) {
            const NumberField& F = *c.F;
            Ideal O = Ideal::unit(c.F);
            UnitData u = unit_basis(c.F, O);
            Ideal cc = prime_ideal(c.F, c.ell, c.root);
            Ideal a = c.ell == 11 ? prime_ideal(c.F, 19, 9) : prime_ideal(c.F, 17, 6);
            ZetaOptions zo;
            zo.crosscheck_max_k = static_cast<int>(kmax);
            ZetaData Z = build_zeta_data(c.F, O, a, cc, c.ell, u);
            std::vector<Rational> base;
            for (long k = 0; k <= kmax; ++k) {
                ZetaResult r = zeta_minus_k_detailed(Z, k, zo);
                base.push_back(r.value);
                // single-form choice: every embedding's form, and all forms with Psi^+
                for (const auto& s : r.single_form) fails += s != r.value;
                if (r.plus_full) fails += *r.plus_full != r.value;
                ++variants;
            }
            auto compare = [&](const ZetaData& Y) {
                for (long k = 0; k <= kmax; ++k) fails += zeta_minus_k(Y, k) != base[k];
                ++variants;
            };
            // class representative a -> a (alpha), alpha >> 0
            compare(build_zeta_data(c.F, O, a * Ideal::principal(c.F, c.alpha), cc, c.ell, u));
            // adapted bases, one of each orientation
            long l = c.ell;
            std::vector<std::vector<FieldElement>> bases = {
                {F.add(Z.w[0], F.scale(Z.w[1], l)), Z.w[1]},
                {Z.w[0], F.neg(Z.w[1])},
                {F.add(Z.w[0], F.scale(Z.w[1], -2 * l)), F.add(Z.w[0], F.scale(Z.w[1], -(2 * l - 1)))},
            };
            for (const auto& w : bases) compare(build_zeta_data(c.F, O, a, cc, c.ell, u, w));
            // unit orientation
            UnitData inv = u;
            inv.eps[0] = F.inv(u.eps[0]);
            inv.sign_det_R = sign_det_log_units(F, inv.eps);
            compare(build_zeta_data(c.F, O, a, cc, c.ell, inv));
            // embedding order: the same field presented by another generator
            Ideal OG = Ideal::unit(c.G);
            ZetaData ZG = build_zeta_data(c.G, OG, OG, prime_ideal(c.G, c.ell, c.root_G), c.ell, unit_basis(c.G, OG));
            ZetaData ZO = build_zeta_data(c.F, O, O, cc, c.ell, u);
            for (long k = 0; k <= kmax; ++k) fails += zeta_minus_k(ZG, k) != zeta_minus_k(ZO, k);
            ++variants;
        }
        d << variants << " variants, " << fails << " mismatches";
        return fails == 0;
    });
}

CheckResult twice_smoothed(const CheckOptions& o) {
    return timed(9, "twice-smoothed integrality", 60, o, [&](std::ostringstream& d) {
        FieldPtr F = golden();
        Ideal O = Ideal::unit(F);
        SmoothingCombination r =
            combine_smoothing(F, O, O, prime_ideal(F, 11, 4), 11, prime_ideal(F, 19, 9), 19, 1, unit_basis(F, O));
        Rational oracle = Rational(1 - 121) * Rational(1 - 361) * siegel_zeta(5, 1);
        d << "value " << to_string(r.twice_smoothed) << ", oracle " << to_string(oracle);
        return r.twice_smoothed == 1440 && r.twice_smoothed == oracle && is_integer(r.twice_smoothed);
    });
}

std::vector<CheckResult> run_all(const CheckOptions& o) {
    return {exact_zeta_values(o),   integrality_sweep(o), cocycle_relations(o),
            fast_path(o),           measure_consistency(o), interpolation(o),
            order_of_vanishing(o),  invariance(o),          twice_smoothed(o)};
}

} // namespace eis::checks
