#include "eisenstein/zeta.hpp"

#include "eisenstein/error.hpp"

#include <algorithm>
#include <numeric>

namespace eis {

namespace {

RatMatrix columns(const std::vector<FieldElement>& xs, int n) {
    RatMatrix m(n, static_cast<int>(xs.size()));
    for (size_t j = 0; j < xs.size(); ++j) m.set_col(static_cast<int>(j), xs[j].c);
    return m;
}

bool totally_positive(const NumberField& F, const FieldElement& x) {
    for (int i = 0; i < F.degree(); ++i)
        if (F.sign_at(x, i) <= 0) return false;
    return true;
}

int permutation_sign(const std::vector<int>& p) {
    int s = 1;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) s = -s;
    return s;
}

void check(bool ok, const std::string& what) {
    if (!ok) fail(Errc::CrossCheckFailure, "zeta data invariant violated: " + what);
}

} // namespace

ZetaData build_zeta_data(FieldPtr F, const Ideal& f, const Ideal& a, const Ideal& c, long ell, const UnitData& units,
                         const std::optional<std::vector<FieldElement>>& basis) {
    int n = F->degree();
    if (n < 2) fail(Errc::DegreeError, "degree must be at least 2");
    if (!a.is_integral() || !f.is_integral() || !c.is_integral())
        fail(Errc::ShapeError, "a, f and c must be integral ideals");
    if (!is_prime(ell) || c.norm() != ell) fail(Errc::IndexNotPrime, "c must have prime norm l");
    if (!is_coprime(a, f)) fail(Errc::ShapeError, "a and f must be coprime");
    if (!is_coprime(c, f)) fail(Errc::ShapeError, "c and f must be coprime");
    if (static_cast<int>(units.eps.size()) != n - 1) fail(Errc::DependentUnits, "expected n-1 units");
    for (const auto& e : units.eps) {
        if (!totally_positive(*F, e)) fail(Errc::NotTotallyPositive, "unit " + F->element_str(e) + " is not totally positive");
        if (!congruent_mod_ideal(e, F->one(), f)) fail(Errc::NotCongruentOne, "unit " + F->element_str(e) + " is not 1 mod f");
    }

    ZetaData Z;
    Z.F = F;
    Z.f = f;
    Z.a = a;
    Z.c = c;
    Z.ell = ell;
    Z.units = units;
    Ideal L1 = a.inverse() * f;
    Ideal L2 = L1 * c.inverse();
    if (basis) {
        if (static_cast<int>(basis->size()) != n) fail(Errc::ShapeError, "basis must have n elements");
        Z.w = *basis;
        std::vector<FieldElement> w2 = Z.w;
        w2[0] = F->scale(w2[0], Rational(1, ell));
        RatMatrix Wc = columns(Z.w, n);
        if (det(Wc) == 0 || lattice_hnf(Wc, n) != L1.basis_matrix())
            fail(Errc::ShapeError, "supplied basis does not span a^-1 f");
        if (lattice_hnf(columns(w2, n), n) != L2.basis_matrix())
            fail(Errc::ShapeError, "supplied basis is not adapted to c");
    } else {
        Z.w = adapted_basis(a, f, c, ell);
    }
    Z.wdual = dual_basis(*F, Z.w);

    // v = (Tr w*_j), and sum v_j w_j = 1
    FieldElement one = F->zero();
    for (int j = 0; j < n; ++j) {
        Z.v.push_back(F->trace(Z.wdual[j]));
        one = F->add(one, F->scale(Z.w[j], Z.v[j]));
    }
    check(one == F->one(), "w . v = 1");

    RatMatrix Wc = columns(Z.w, n);
    RatMatrix Wci = inverse(Wc);
    for (const auto& e : units.eps) {
        std::vector<FieldElement> img;
        for (const auto& wj : Z.w) img.push_back(F->mul(wj, e));
        RatMatrix Ai = Wci * columns(img, n);
        if (!is_integral(Ai) || det(Ai) != 1 || !is_in_gamma_ell(Ai, ell))
            fail(Errc::ChainDegenerate, "unit matrix " + to_string(Ai) + " is not in Gamma_l with det 1");
        Z.A.push_back(std::move(Ai));
    }

    // P = N(ac) N(sum w_j X_j)
    std::vector<MultiPoly> g(n, MultiPoly(n));
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            Exponent e(n, 0);
            e[j] = 1;
            if (Z.w[j].c[k] != 0) g[k].add_term(e, Z.w[j].c[k]);
        }
    Rational Nac = a.norm() * c.norm();
    Z.P = resultant_norm(F->poly(), g) * Nac;
    check(Z.P.is_homogeneous() && Z.P.degree() == n, "P homogeneous of degree n");
    for (const auto& [e, coef] : Z.P.terms()) check(denominator_supported_on(coef, {ell}), "P has Z[1/l] coefficients");
    check(Z.P.evaluate(Z.v) == Nac, "P(v) = N(ac)");

    std::vector<std::vector<FieldElement>> rows(n, Z.wdual);
    std::vector<int> emb(n);
    std::iota(emb.begin(), emb.end(), 0);
    Z.Qfull = FormsMatrix::embedded(F, rows, emb);
    for (int i = 0; i < n; ++i) Z.Qsingle.push_back(FormsMatrix::embedded(F, {Z.wdual}, {i}));

    Z.sign_det_W = sign_det_embeddings(*F, Z.w);
    Z.rho = ((n - 1) % 2 == 0 ? 1 : -1) * Z.sign_det_W * units.sign_det_R;

    // rho * sum_pi sgn(pi) (1, A_pi1, A_pi1 A_pi2, ...)
    std::vector<int> perm(n - 1);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        CocycleTuple t;
        RatMatrix cur = RatMatrix::identity(n);
        t.emplace_back(cur, ell);
        for (int i = 0; i < n - 1; ++i) {
            cur = cur * Z.A[perm[i]];
            t.emplace_back(cur, ell);
        }
        Z.chain.add(Integer(Z.rho * permutation_sign(perm)), std::move(t));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return Z;
}

ZetaResult zeta_minus_k_detailed(const ZetaData& Z, long k, const ZetaOptions& opt) {
    if (k < 0) fail(Errc::ShapeError, "k must be nonnegative");
    int n = Z.F->degree();
    MultiPoly Pk = Z.P.pow(static_cast<unsigned>(k));
    PsiOptions po;
    po.cache = opt.cache;
    ZetaResult out;
    out.value = psi_ell_chain(Z.chain, {Pk, Z.Qsingle[0], Z.v}, Z.ell, po);
    if (!opt.crosscheck || k > opt.crosscheck_max_k) return out;
    out.single_form.push_back(out.value);
    for (int i = 1; i < n; ++i) {
        Rational x = psi_ell_chain(Z.chain, {Pk, Z.Qsingle[i], Z.v}, Z.ell, po);
        out.single_form.push_back(x);
        if (x != out.value)
            fail(Errc::CrossCheckFailure, "single-form values differ: embedding 0 gives " + to_string(out.value) +
                                              ", embedding " + std::to_string(i) + " gives " + to_string(x));
    }
    PsiOptions pp = po;
    pp.plus = true;
    out.plus_full = psi_ell_chain(Z.chain, {Pk, Z.Qfull, Z.v}, Z.ell, pp);
    if (*out.plus_full != out.value)
        fail(Errc::CrossCheckFailure, "Psi_l^+ with all forms gives " + to_string(*out.plus_full) + ", single form gives " +
                                          to_string(out.value));
    out.crosschecked = true;
    return out;
}

Rational zeta_minus_k(const ZetaData& Z, long k, const ZetaOptions& opt) { return zeta_minus_k_detailed(Z, k, opt).value; }

SmoothingCombination combine_smoothing(FieldPtr F, const Ideal& f, const Ideal& a, const Ideal& b, long ell_b,
                                       const Ideal& c, long ell_c, long k, const UnitData& units,
                                       const ZetaOptions& opt) {
    if (ell_b == ell_c) fail(Errc::ShapeError, "smoothing ideals must have coprime norms");
    Rational zc_ab = zeta_minus_k(build_zeta_data(F, f, a * b, c, ell_c, units), k, opt);
    Rational zc_a = zeta_minus_k(build_zeta_data(F, f, a, c, ell_c, units), k, opt);
    Rational zb_ac = zeta_minus_k(build_zeta_data(F, f, a * c, b, ell_b, units), k, opt);
    Rational zb_a = zeta_minus_k(build_zeta_data(F, f, a, b, ell_b, units), k, opt);
    Rational Nb = pow_q(Rational(ell_b), 1 + k), Nc = pow_q(Rational(ell_c), 1 + k);
    SmoothingCombination out;
    out.twice_smoothed = zc_ab - Nb * zc_a;
    Rational other = zb_ac - Nc * zb_a;
    if (other != out.twice_smoothed)
        fail(Errc::CrossCheckFailure, "twice-smoothed values differ: " + to_string(out.twice_smoothed) + " vs " +
                                          to_string(other));
    out.composite = zc_ab + Nc * zb_a;
    return out;
}

std::vector<Ideal> primes_f_p(const Ideal& f, long p) {
    std::vector<Ideal> out;
    for (const auto& pf : primes_above(f.field(), p))
        if (is_coprime(pf.P, f)) out.push_back(pf.P);
    return out;
}

ClassRep find_class_rep(const Ideal& a, const Ideal& b, const Ideal& f, const std::vector<Ideal>& avoid, int radius) {
    const FieldPtr& F = a.field();
    int n = F->degree();
    if (!is_coprime(b, f)) fail(Errc::ShapeError, "b must be coprime to f");
    // pi0 in b with pi0 = 1 mod f, from an HNF of [b | f] in O-coordinates
    RatMatrix Oi = inverse(F->maximal_order());
    IntegerMatrix M(n, 2 * n);
    RatMatrix cb = Oi * b.basis_matrix(), cf = Oi * f.basis_matrix();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            M(i, j) = cb(i, j).get_num();
            M(i, n + j) = cf(i, j).get_num();
            if (!is_integer(cb(i, j)) || !is_integer(cf(i, j))) fail(Errc::ShapeError, "b and f must be integral");
        }
    HnfResult h = hnf(M);
    for (int i = 0; i < n; ++i)
        if (h.H(i, i) != 1) fail(Errc::ShapeError, "b and f are not coprime");
    RatVec t = Oi * F->one().c;
    IntVec z(2 * n, 0);
    for (int j = 0; j < n; ++j)
        for (int r = 0; r < 2 * n; ++r) z[r] += h.U(r, j) * t[j].get_num();
    FieldElement pi0 = F->zero();
    auto bb = b.basis();
    for (int j = 0; j < n; ++j) pi0 = F->add(pi0, F->scale(bb[j], z[j]));
    if (!b.contains(pi0) || !congruent_mod_ideal(pi0, F->one(), f)) fail(Errc::ShapeError, "CRT element failed");

    Ideal bf = b * f;
    auto g = bf.basis();
    Ideal binv = b.inverse();
    for (int r = 0; r <= radius; ++r) {
        std::optional<FieldElement> best;
        Rational best_tr;
        std::vector<long> c(n, -r);
        while (true) {
            long mx = 0;
            for (long x : c) mx = std::max(mx, std::labs(x));
            if (mx == r) {
                FieldElement pi = pi0;
                for (int j = 0; j < n; ++j)
                    if (c[j]) pi = F->add(pi, F->scale(g[j], c[j]));
                if (!pi.is_zero() && totally_positive(*F, pi)) {
                    Ideal q = Ideal::principal(F, pi) * binv;
                    bool ok = q.is_integral();
                    for (const auto& P : avoid) ok = ok && is_coprime(q, P);
                    Rational tr = F->trace(pi);
                    if (ok && (!best || tr < best_tr || (tr == best_tr && pi.c < best->c))) {
                        best = pi;
                        best_tr = tr;
                    }
                }
            }
            int k = n - 1;
            while (k >= 0 && ++c[k] > r) {
                c[k] = -r;
                --k;
            }
            if (k < 0) break;
        }
        if (best) return {b, a * Ideal::principal(F, *best) * binv};
    }
    fail(Errc::NotFoundWithinBound, "no class representative found within radius " + std::to_string(radius));
}

ZetaStarResult zeta_star_minus_k(const ZetaData& Z, long p, long k, const std::optional<std::vector<ClassRep>>& class_data,
                                 const ZetaOptions& opt) {
    if (!is_prime(p)) fail(Errc::ShapeError, "p must be prime");
    std::vector<Ideal> fp = primes_f_p(Z.f, p);
    std::vector<Ideal> avoid = {Z.c};
    for (const auto& pf : primes_above(Z.F, p)) avoid.push_back(pf.P);
    ZetaStarResult out;
    out.value = 0;
    size_t m = fp.size();
    for (unsigned long mask = 0; mask < (1ul << m); ++mask) {
        StarTerm t;
        t.b = Ideal::unit(Z.F);
        int cnt = 0;
        for (size_t i = 0; i < m; ++i)
            if (mask >> i & 1ul) {
                t.b = t.b * fp[i];
                ++cnt;
            }
        t.mu = cnt % 2 == 0 ? 1 : -1;
        if (mask == 0) {
            t.rep = Z.a;
            t.zeta = zeta_minus_k(Z, k, opt);
        } else {
            if (class_data) {
                auto it = std::find_if(class_data->begin(), class_data->end(), [&](const ClassRep& r) { return r.b == t.b; });
                if (it == class_data->end()) fail(Errc::MissingClassData, "no class representative for b = " + t.b.str());
                t.rep = it->rep;
            } else {
                t.rep = find_class_rep(Z.a, t.b, Z.f, avoid).rep;
            }
            t.zeta = zeta_minus_k(build_zeta_data(Z.F, Z.f, t.rep, Z.c, Z.ell, Z.units), k, opt);
        }
        out.value += Rational(t.mu) * pow_q(t.b.norm(), k) * t.zeta;
        out.terms.push_back(std::move(t));
    }
    return out;
}

} // namespace eis
