#include "eisenstein/padic.hpp"

#include "eisenstein/error.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace eis {

namespace {

Integer ppow(long p, long e) { return pow_z(Integer(p), static_cast<unsigned long>(std::max(0L, e))); }

Integer inv_mod(const Integer& a, const Integer& m) {
    Integer r;
    if (m == 1) return 0;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t())) fail(Errc::DivisionByZero, "not invertible mod p^M");
    return r;
}

Integer pow_mod(const Integer& a, const Integer& e, const Integer& m) {
    Integer r;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

Integer residue_of(const Rational& q, long p, const Integer& mod) {
    if (mpz_divisible_ui_p(q.get_den_mpz_t(), static_cast<unsigned long>(p)))
        fail(Errc::NotPIntegral, to_string(q) + " is not " + std::to_string(p) + "-integral");
    return mod_pos(q.get_num() * inv_mod(q.get_den(), mod), mod);
}

void check_p(long a, long b) {
    if (a != b) fail(Errc::MismatchedField, "p-adic numbers for different primes");
}

} // namespace

PadicInt::PadicInt(long p, long M, const Integer& residue) : p_(p), M_(std::max(0L, M)) {
    if (p < 2) fail(Errc::ShapeError, "p must be a prime");
    r_ = mod_pos(residue, ppow(p, M_));
}

PadicInt PadicInt::from_rational(const Rational& q, long p, long M) { return PadicInt(p, M, residue_of(q, p, ppow(p, M))); }

long PadicInt::valuation() const {
    if (r_ == 0) return M_;
    return eis::valuation(r_, Integer(p_));
}

PadicInt PadicInt::with_precision(long M) const { return PadicInt(p_, std::min(M, M_), r_); }

PadicInt PadicInt::operator-() const { return PadicInt(p_, M_, -r_); }

PadicInt operator+(const PadicInt& a, const PadicInt& b) {
    check_p(a.p_, b.p_);
    return PadicInt(a.p_, std::min(a.M_, b.M_), a.r_ + b.r_);
}

PadicInt operator-(const PadicInt& a, const PadicInt& b) {
    check_p(a.p_, b.p_);
    return PadicInt(a.p_, std::min(a.M_, b.M_), a.r_ - b.r_);
}

PadicInt operator*(const PadicInt& a, const PadicInt& b) {
    check_p(a.p_, b.p_);
    long M = std::min(a.M_ + b.valuation(), b.M_ + a.valuation());
    return PadicInt(a.p_, M, a.r_ * b.r_);
}

PadicInt PadicInt::pow(unsigned long e) const {
    if (e == 0) return PadicInt(p_, M_, 1);
    // x^e: relative precision M - v is preserved, valuation scales by e.
    long v = valuation();
    if (r_ == 0) return PadicInt(p_, M_ + (static_cast<long>(e) - 1) * v, 0);
    long M = (M_ - v) + static_cast<long>(e) * v;
    Integer mod = ppow(p_, M);
    return PadicInt(p_, M, pow_mod(r_, Integer(static_cast<unsigned long>(e)), mod));
}

PadicInt PadicInt::inverse() const {
    if (valuation() != 0 || M_ == 0) fail(Errc::DivisionByZero, "inverse of a non-unit " + str());
    return PadicInt(p_, M_, inv_mod(r_, ppow(p_, M_)));
}

PadicInt PadicInt::unit_part() const {
    if (r_ == 0) fail(Errc::PrecisionExhausted, "value is 0 mod " + std::to_string(p_) + "^" + std::to_string(M_));
    long v = valuation();
    Integer u = r_;
    mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), ppow(p_, v).get_mpz_t());
    return PadicInt(p_, M_ - v, u);
}

bool PadicInt::agrees(const PadicInt& o, long m) const {
    check_p(p_, o.p_);
    if (m > std::min(M_, o.M_)) return false;
    return (*this - o).with_precision(m).is_zero();
}

bool PadicInt::agrees(const Rational& q, long m) const {
    if (m > M_) return false;
    return agrees(from_rational(q, p_, M_), m);
}

std::string PadicInt::str() const {
    return to_string(r_) + " + O(" + std::to_string(p_) + "^" + std::to_string(M_) + ")";
}

PadicInt teichmuller(const PadicInt& x) {
    long p = x.p(), M = x.precision();
    if (M == 0) return x;
    if (x.valuation() != 0) fail(Errc::DivisionByZero, "Teichmuller lift of a non-unit");
    if (p == 2) {
        if (M == 1) return PadicInt(2, 1, 1);
        return PadicInt(2, M, x.residue() % 4 == 1 ? 1 : -1);
    }
    // omega(x) = x^{p^{M-1}} mod p^M depends only on x mod p
    Integer mod = ppow(p, M);
    return PadicInt(p, M, pow_mod(x.residue(), ppow(p, M - 1), mod));
}

PadicInt one_unit_part(const PadicInt& u) { return u * teichmuller(u).inverse(); }

PadicInt iwasawa_log(const PadicInt& x) {
    long p = x.p();
    PadicInt u = x.unit_part();
    long m = u.precision();
    if (m == 0) return PadicInt(p, 0, 0);
    PadicInt z = one_unit_part(u) - PadicInt(p, m, 1);
    if (z.is_zero()) return PadicInt(p, m, 0);
    long vz = z.valuation();
    // terms z^n / n, v >= n vz - log_p n; z^n reduced mod p^{m+E}
    long N = 1;
    auto vlog = [&](long n) {
        long e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        return e;
    };
    long E = 0;
    while (true) {
        long lb = N * vz - vlog(N);
        E = std::max(E, vlog(N));
        if (lb >= m && N * vz >= m + E) break;
        ++N;
    }
    Integer mod = ppow(p, m + E);
    Integer mm = ppow(p, m);
    Integer zp = 1, sum = 0;
    for (long n = 1; n <= N; ++n) {
        zp = zp * z.residue() % mod;
        long vn = vlog(n);
        Integer t = zp;
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), ppow(p, vn).get_mpz_t());
        long un = n;
        for (long i = 0; i < vn; ++i) un /= p;
        t = t * inv_mod(Integer(un), mm);
        if (n % 2 == 0) sum -= t;
        else sum += t;
    }
    return PadicInt(p, m, sum);
}

PadicInt padic_exp(const PadicInt& x) {
    long p = x.p(), m = x.precision();
    long need = p == 2 ? 2 : 1;
    if (x.valuation() < need) fail(Errc::NotPIntegral, "exp does not converge at " + x.str());
    if (x.is_zero()) return PadicInt(p, m, 1);
    long vz = x.valuation();
    Integer mm = ppow(p, m);
    Integer sum = 1;
    Rational term = 1;
    for (long n = 1;; ++n) {
        term *= Rational(x.residue());
        term /= n;
        long lb = n * vz - (n - 1) / (p - 1);
        Integer r = residue_of(term, p, mm);
        sum += r;
        if (lb >= m + 1) break;
    }
    return PadicInt(p, m, sum);
}

// ---------------------------------------------------------------------------
// measure

namespace {

long ideal_valuation(const Ideal& I, const Ideal& P) {
    long k = 0;
    Ideal Pk = P;
    while (I + Pk == Pk) {
        ++k;
        Pk = Pk * P;
        if (k > 64) fail(Errc::ShapeError, "valuation of the zero ideal");
    }
    return k;
}

bool totally_positive(const NumberField& F, const FieldElement& x) {
    for (int i = 0; i < F.degree(); ++i)
        if (F.sign_at(x, i) <= 0) return false;
    return true;
}

} // namespace

MeasureHandle make_measure(FieldPtr F, const Ideal& f, const Ideal& a, const Ideal& c, long ell, const UnitData& units,
                           long p, const std::optional<std::vector<FieldElement>>& basis) {
    if (!is_prime(p)) fail(Errc::ShapeError, "p must be prime");
    if (p == ell) fail(Errc::ShapeError, "the smoothing prime l must differ from p");
    if (!is_coprime(a, f)) fail(Errc::ShapeError, "a must be coprime to f");
    for (const auto& e : units.eps)
        if (!congruent_mod_ideal(e, F->one(), f)) fail(Errc::NotCongruentOne, "unit " + F->element_str(e) + " is not 1 mod f");
    MeasureHandle h;
    h.p = p;
    h.f = f;
    h.f1 = Ideal::unit(F);
    for (const auto& pf : primes_above(F, p)) {
        if (!is_coprime(a, pf.P)) fail(Errc::ShapeError, "a must be coprime to p");
        long k = ideal_valuation(f, pf.P);
        if (k > 0) h.f1 = h.f1 * pf.P.pow(k);
    }
    h.f0 = f * h.f1.inverse();
    h.Z = build_zeta_data(F, h.f0, a, c, ell, units, basis);
    h.mu = std::make_shared<ChainMeasure>(h.Z.chain, h.Z.Qsingle[0], ell);
    h.vden = 1;
    for (const auto& x : h.Z.v) mpz_lcm(h.vden.get_mpz_t(), h.vden.get_mpz_t(), x.get_den_mpz_t());
    if (mpz_divisible_ui_p(h.vden.get_mpz_t(), static_cast<unsigned long>(p)))
        fail(Errc::NotPIntegral, "v is not p-integral");
    for (const auto& x : h.Z.v) h.vnum.push_back(Rational(x * h.vden).get_num());
    return h;
}

Rational measure_box(const MeasureHandle& h, const IntVec& a, long r) {
    if (r < 0) fail(Errc::ShapeError, "box level must be nonnegative");
    int n = h.mu->n();
    if (static_cast<int>(a.size()) != n) fail(Errc::ShapeError, "box offset has the wrong length");
    IntVec N(n);
    for (int i = 0; i < n; ++i) N[i] = h.vnum[i] + a[i] * h.vden;
    return ratio(h.mu->numerator(N, h.vden * ppow(h.p, r)), h.mu->denominator());
}

PiData make_pi_data(const Ideal& P, const Ideal& f, int bound) {
    GeneratorResult g = totally_positive_generator(P, f, bound);
    return {P, g.e, g.pi};
}

PiData make_pi_data(const Ideal& P, const Ideal& f, const FieldElement& pi) {
    const FieldPtr& F = P.field();
    if (!totally_positive(*F, pi)) fail(Errc::NotTotallyPositive, "pi is not totally positive");
    if (!congruent_mod_ideal(pi, F->one(), f)) fail(Errc::NotCongruentOne, "pi is not 1 mod f");
    Ideal I = Ideal::principal(F, pi);
    for (int e = 1; e <= 64; ++e)
        if (I == P.pow(e)) return {P, e, pi};
    fail(Errc::ShapeError, "(pi) is not a power of P");
}

// ---------------------------------------------------------------------------
// regions

namespace {

// Sublattice T Z_p^n of Z_p^n (w-coordinates) with |det T| a power of p.
struct PLattice {
    IntegerMatrix adj;
    Integer det; // |det T|
    int level = 0;

    bool contains(const std::vector<Integer>& y) const {
        int n = adj.rows();
        for (int r = 0; r < n; ++r) {
            Integer s = 0;
            for (int c = 0; c < n; ++c) s += adj(r, c) * y[c];
            if (!mpz_divisible_p(s.get_mpz_t(), det.get_mpz_t())) return false;
        }
        return true;
    }
};

PLattice plattice(const IntegerMatrix& T, long p) {
    PLattice L;
    Integer d = det(T);
    if (d == 0) fail(Errc::SingularMatrix, "singular lattice");
    L.det = abs(d);
    L.adj = adjugate(T);
    Integer rest = L.det;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), static_cast<unsigned long>(p))) rest /= p;
    if (rest != 1) fail(Errc::ShapeError, "lattice index is not a power of p");
    // least t with p^t Z^n inside T Z^n
    int n = T.rows();
    while (true) {
        Integer pt = ppow(p, L.level);
        bool ok = true;
        for (int r = 0; r < n && ok; ++r)
            for (int c = 0; c < n && ok; ++c)
                if (!mpz_divisible_p(Integer(L.adj(r, c) * pt).get_mpz_t(), L.det.get_mpz_t())) ok = false;
        if (ok) break;
        ++L.level;
    }
    return L;
}

// Elements of a^{-1} f_0 I in w-coordinates.
PLattice ideal_lattice(const MeasureHandle& h, const Ideal& I) {
    int n = h.Z.F->degree();
    RatMatrix W(n, n);
    for (int j = 0; j < n; ++j) W.set_col(j, h.Z.w[j].c);
    Ideal L = h.Z.a.inverse() * h.f0 * I;
    RatMatrix T = inverse(W) * L.basis_matrix();
    return plattice(to_integer(T), h.p);
}

struct LocalTest {
    PLattice lat;
    bool shifted = false; // test j (xi - 1) instead of v + j (xi)
    bool inside = true;   // required membership
};

struct RegionSpec {
    std::vector<LocalTest> tests;
    std::string descriptor;
};

RegionSpec region_spec(const MeasureHandle& h, RegionKind kind, const RegionParams& prm) {
    RegionSpec s;
    const FieldPtr& F = h.Z.F;
    auto primes = primes_above(F, h.p);
    auto add = [&](const Ideal& I, bool shifted, bool inside) { s.tests.push_back({ideal_lattice(h, I), shifted, inside}); };
    if (kind == RegionKind::Lattice) {
        int n = F->degree();
        IntegerMatrix M = prm.lattice ? *prm.lattice : IntegerMatrix::identity(n).scaled(ppow(h.p, prm.r));
        if (M.rows() != n || M.cols() != n) fail(Errc::ShapeError, "lattice matrix has the wrong shape");
        if (!prm.a.empty() && static_cast<int>(prm.a.size()) != n) fail(Errc::ShapeError, "lattice offset has the wrong length");
        s.tests.push_back({plattice(M, h.p), true, true});
        s.descriptor = "lattice " + to_string(M);
        return s;
    }
    std::optional<Ideal> b = prm.b;
    if (kind == RegionKind::IdealF || kind == RegionKind::IdealUnitsF) {
        if (!b) fail(Errc::ShapeError, "region needs the ideal b");
        if (!b->is_integral() || !is_coprime(*b, h.f)) fail(Errc::ShapeError, "b must be integral and coprime to f");
        Integer nb = b->norm().get_num();
        while (nb % h.p == 0) nb /= h.p;
        if (nb != 1) fail(Errc::ShapeError, "b must have p-power norm");
    }
    if (kind == RegionKind::Bold && prm.pis.empty()) fail(Errc::ShapeError, "region O needs pi-data");
    for (const auto& pf : primes) {
        const Ideal& P = pf.P;
        long kf = ideal_valuation(h.f, P);
        if (kf > 0) {
            add(P.pow(kf), true, true);
            continue;
        }
        if (kind == RegionKind::UnitsF) {
            add(P, false, false);
        } else if (kind == RegionKind::IdealF) {
            long kb = ideal_valuation(*b, P);
            if (kb > 0) add(P.pow(kb), false, true);
        } else if (kind == RegionKind::IdealUnitsF) {
            long kb = ideal_valuation(*b, P);
            if (kb > 0) add(P.pow(kb), false, true);
            add(P.pow(kb + 1), false, false);
        } else if (kind == RegionKind::Bold) {
            auto it = std::find_if(prm.pis.begin(), prm.pis.end(), [&](const PiData& d) { return d.P == P; });
            add(P.pow(it == prm.pis.end() ? 1 : it->e), false, false);
        }
    }
    for (const auto& d : prm.pis) {
        if (std::none_of(primes.begin(), primes.end(), [&](const PrimeFactor& pf) { return pf.P == d.P; }))
            fail(Errc::ShapeError, "pi-data prime does not lie above p");
        if (!is_coprime(d.P, h.f)) fail(Errc::ShapeError, "pi-data prime divides f");
    }
    switch (kind) {
    case RegionKind::UnitsF: s.descriptor = "O*_{p,f}"; break;
    case RegionKind::IdealF: s.descriptor = "O_{p,b,f} b=" + b->str(); break;
    case RegionKind::IdealUnitsF: s.descriptor = "O*_{p,b,f} b=" + b->str(); break;
    case RegionKind::Bold: s.descriptor = "O (pi-data, " + std::to_string(prm.pis.size()) + " primes)"; break;
    default: break;
    }
    return s;
}

} // namespace

int region_min_level(const MeasureHandle& h, RegionKind kind, const RegionParams& params) {
    RegionSpec s = region_spec(h, kind, params);
    int t = 0;
    for (const auto& x : s.tests) t = std::max(t, x.lat.level);
    return t;
}

Region region_build(const MeasureHandle& h, RegionKind kind, const RegionParams& params) {
    RegionSpec s = region_spec(h, kind, params);
    int t = 0;
    for (const auto& x : s.tests) t = std::max(t, x.lat.level);
    if (params.level) {
        if (*params.level < t)
            fail(Errc::LevelTooSmall, "level " + std::to_string(*params.level) + " < required " + std::to_string(t));
        t = *params.level;
    }
    int n = h.Z.F->degree();
    Region R;
    R.kind = kind;
    R.p = h.p;
    R.n = n;
    R.t = t;
    R.descriptor = s.descriptor;
    Integer pt = ppow(h.p, t);
    Integer total = pow_z(pt, static_cast<unsigned long>(n));
    if (total > Integer(1) << 28) fail(Errc::Unsupported, "region level too large to tabulate");
    long P = pt.get_si();
    size_t cnt = total.get_ui();
    R.member.assign(cnt, false);
    std::vector<Integer> vres(n);
    Integer big = pt * pt; // any representative of v mod p^t works
    for (int i = 0; i < n; ++i) vres[i] = residue_of(h.Z.v[i], h.p, big);
    IntVec a = params.a.empty() ? IntVec(n, 0) : params.a;
    std::vector<Integer> x(n), y(n);
    for (size_t idx = 0; idx < cnt; ++idx) {
        size_t r = idx;
        for (int i = 0; i < n; ++i) {
            long j = static_cast<long>(r % P);
            r /= P;
            y[i] = j;
            x[i] = vres[i] + j;
        }
        bool in = true;
        for (const auto& test : s.tests) {
            if (kind == RegionKind::Lattice) {
                std::vector<Integer> d(n);
                for (int i = 0; i < n; ++i) d[i] = y[i] - a[i];
                in = test.lat.contains(d);
            } else {
                bool c = test.lat.contains(test.shifted ? y : x);
                in = in && c == test.inside;
            }
            if (!in) break;
        }
        R.member[idx] = in;
    }
    return R;
}

bool Region::contains(const std::vector<long>& j) const {
    long P = ppow(p, t).get_si();
    size_t idx = 0, mul = 1;
    for (int i = 0; i < n; ++i) {
        long r = j[i] % P;
        if (r < 0) r += P;
        idx += static_cast<size_t>(r) * mul;
        mul *= static_cast<size_t>(P);
    }
    return member[idx];
}

size_t Region::count() const { return static_cast<size_t>(std::count(member.begin(), member.end(), true)); }

// ---------------------------------------------------------------------------
// Riemann sums

namespace {

// Polynomial with coefficients reduced mod p^K.
class ModPoly {
public:
    ModPoly(const MultiPoly& P, long p, const Integer& mod) : n_(P.nvars()), deg_(std::max(0, P.degree())) {
        for (const auto& [e, c] : P.terms()) terms_.push_back({e, residue_of(c, p, mod)});
    }
    Integer eval(const std::vector<Integer>& x, const Integer& mod) const {
        std::vector<std::vector<Integer>> pw(n_, std::vector<Integer>(deg_ + 1));
        for (int i = 0; i < n_; ++i) {
            pw[i][0] = 1;
            for (int d = 1; d <= deg_; ++d) pw[i][d] = pw[i][d - 1] * x[i] % mod;
        }
        Integer s = 0, t;
        for (const auto& [e, c] : terms_) {
            t = c;
            for (int i = 0; i < n_; ++i)
                if (e[i]) t = t * pw[i][e[i]] % mod;
            s += t;
        }
        return mod_pos(s, mod);
    }

private:
    int n_, deg_;
    std::vector<std::pair<Exponent, Integer>> terms_;
};

// Fills out[0..) with residues mod p^K of the integrand at the point x
// (residues mod p^K of v + j). Returns the precision lost at this cell, or -1
// when the value is not determined at precision K.
using CellFn = std::function<long(const std::vector<Integer>& x, std::vector<Integer>& out)>;

struct SumSpec {
    long L = 0;          // Riemann level
    long K = 0;          // arithmetic precision
    int outputs = 1;
    bool stratified = false; // cell precision capped at level - loss
    bool refine = false;     // refine cells until level - loss >= target
    long target = 0;
};

struct SumResult {
    std::vector<Integer> sums; // mod p^K, measure denominator not yet removed
    long precision = 0;
    size_t cells = 0;
};

class RiemannRunner {
public:
    RiemannRunner(const MeasureHandle& h, const Region* R, const SumSpec& s, const CellFn& f, const RiemannOptions& opt)
        : h_(h), R_(R), s_(s), f_(f), opt_(opt), n_(h.mu->n()) {
        mod_ = ppow(h.p, s.K);
        vres_.resize(n_);
        for (int i = 0; i < n_; ++i) vres_[i] = residue_of(h.Z.v[i], h.p, mod_);
    }

    SumResult run() {
        long PL = ppow(h_.p, s_.L).get_si();
        Integer total = pow_z(Integer(PL), static_cast<unsigned long>(n_));
        if (total > Integer(1) << 40) fail(Errc::Unsupported, "too many Riemann cells");
        unsigned long long cnt = total.get_ui();
        int T = std::max(1, opt_.threads);
        std::vector<SumResult> parts(T);
        std::vector<std::exception_ptr> errs(T);
        auto work = [&](int id) {
            try {
                SumResult& out = parts[id];
                out.sums.assign(s_.outputs, 0);
                out.precision = s_.K;
                Worker w(*this, out);
                unsigned long long lo = cnt * id / T, hi = cnt * (id + 1) / T;
                std::vector<long> j(n_);
                for (unsigned long long idx = lo; idx < hi; ++idx) {
                    unsigned long long r = idx;
                    for (int i = 0; i < n_; ++i) {
                        j[i] = static_cast<long>(r % PL);
                        r /= PL;
                    }
                    if (R_ && !R_->contains(j)) continue;
                    w.cell(j, s_.L, 0);
                }
            } catch (...) {
                errs[id] = std::current_exception();
            }
        };
        if (T == 1) {
            work(0);
        } else {
            std::vector<std::thread> th;
            for (int i = 0; i < T; ++i) th.emplace_back(work, i);
            for (auto& t : th) t.join();
        }
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
        SumResult res;
        res.sums.assign(s_.outputs, 0);
        res.precision = s_.K;
        for (const auto& p : parts) {
            for (int k = 0; k < s_.outputs; ++k) res.sums[k] = (res.sums[k] + p.sums[k]) % mod_;
            res.precision = std::min(res.precision, p.precision);
            res.cells += p.cells;
        }
        return res;
    }

private:
    struct Worker {
        const RiemannRunner& R;
        SumResult& out;
        std::vector<Integer> x, vals;
        IntVec N;
        Worker(const RiemannRunner& r, SumResult& o) : R(r), out(o), x(r.n_), vals(r.s_.outputs), N(r.n_) {}

        Integer measure(const std::vector<long>& j, long L) {
            const MeasureHandle& h = R.h_;
            __int128 N128[8], D = 0, res = 0;
            bool fast = R.n_ <= 8 && h.vden.fits_slong_p() && L < 60;
            if (fast) {
                Integer Dz = h.vden * ppow(h.p, L);
                fast = Dz.fits_slong_p();
                if (fast) D = Dz.get_si();
                for (int i = 0; fast && i < R.n_; ++i) {
                    if (!h.vnum[i].fits_slong_p()) fast = false;
                    else N128[i] = static_cast<__int128>(h.vnum[i].get_si()) + static_cast<__int128>(j[i]) * h.vden.get_si();
                }
            }
            if (fast && h.mu->numerator_fast(N128, D, res)) {
                bool neg = res < 0;
                unsigned __int128 u = neg ? -static_cast<unsigned __int128>(res) : static_cast<unsigned __int128>(res);
                Integer z = static_cast<unsigned long>(u >> 64);
                z <<= 64;
                z += static_cast<unsigned long>(u & ~0ull);
                return neg ? Integer(-z) : z;
            }
            for (int i = 0; i < R.n_; ++i) N[i] = h.vnum[i] + Integer(j[i]) * h.vden;
            return h.mu->numerator(N, h.vden * ppow(h.p, L));
        }

        void cell(const std::vector<long>& j, long L, int depth) {
            for (int i = 0; i < R.n_; ++i) x[i] = mod_pos(R.vres_[i] + j[i], R.mod_);
            long loss = R.f_(x, vals);
            bool refine = loss < 0 || (R.s_.refine && L - loss < R.s_.target);
            if (refine && depth < R.opt_.max_refine && L < 60) {
                long PL = ppow(R.h_.p, L).get_si();
                long p = R.h_.p;
                std::vector<long> jc(R.n_);
                long children = 1;
                for (int i = 0; i < R.n_; ++i) children *= p;
                for (long c = 0; c < children; ++c) {
                    long r = c;
                    for (int i = 0; i < R.n_; ++i) {
                        jc[i] = j[i] + (r % p) * PL;
                        r /= p;
                    }
                    cell(jc, L + 1, depth + 1);
                }
                return;
            }
            if (loss < 0)
                fail(Errc::PrecisionExhausted, "integrand vanishes mod p^" + std::to_string(R.s_.K) + " after refinement");
            long prec = R.s_.K - loss;
            if (R.s_.stratified) prec = std::min(prec, L - loss);
            out.precision = std::min(out.precision, prec);
            Integer m = measure(j, L);
            if (m != 0)
                for (int k = 0; k < R.s_.outputs; ++k) out.sums[k] = (out.sums[k] + m * vals[k]) % R.mod_;
            ++out.cells;
        }
    };

    const MeasureHandle& h_;
    const Region* R_;
    SumSpec s_;
    const CellFn& f_;
    RiemannOptions opt_;
    int n_;
    Integer mod_;
    std::vector<Integer> vres_;
};

// Divides a raw sum by the measure denominator m l^n.
PadicInt finish(const MeasureHandle& h, const Integer& raw, long K, long prec) {
    const Integer& den = h.mu->denominator();
    long d = valuation(den, Integer(h.p));
    Integer s = mod_pos(raw, ppow(h.p, K));
    if (d > 0) {
        if (!mpz_divisible_p(s.get_mpz_t(), ppow(h.p, d).get_mpz_t()))
            fail(Errc::NotPIntegral, "Riemann sum is not p-integral");
        mpz_divexact(s.get_mpz_t(), s.get_mpz_t(), ppow(h.p, d).get_mpz_t());
    }
    Integer du = den;
    mpz_divexact(du.get_mpz_t(), du.get_mpz_t(), ppow(h.p, d).get_mpz_t());
    long M = std::min(prec, K) - d;
    return PadicInt(h.p, M, s * inv_mod(du, ppow(h.p, std::max(M, 0L))));
}

// Runs the sum at level L and L - 1 and fills the estimates.
std::vector<PadicEstimate> estimate(const MeasureHandle& h, const Region* R, SumSpec s, const CellFn& f,
                                    const RiemannOptions& opt) {
    long tmin = R ? R->t : 0;
    s.L = std::max(s.L, static_cast<long>(tmin));
    SumResult hi = RiemannRunner(h, R, s, f, opt).run();
    std::vector<PadicEstimate> out(s.outputs);
    std::optional<SumResult> lo;
    if (s.L - 1 >= tmin) {
        SumSpec s2 = s;
        s2.L = s.L - 1;
        s2.target = s.target - 1;
        lo = RiemannRunner(h, R, s2, f, opt).run();
    }
    for (int k = 0; k < s.outputs; ++k) {
        PadicEstimate& e = out[k];
        e.value = finish(h, hi.sums[k], s.K, hi.precision);
        e.level = s.L;
        e.cells = hi.cells;
        if (lo) {
            PadicInt other = finish(h, lo->sums[k], s.K, lo->precision);
            e.certified = std::min({e.value.precision(), (e.value - other).valuation(), s.L});
        } else {
            e.certified = 0;
        }
    }
    return out;
}

long guard_digits(const MeasureHandle& h, const RiemannOptions& opt) {
    return opt.guard + valuation(h.mu->denominator(), Integer(h.p));
}

} // namespace

PadicEstimate integrate_poly(const MeasureHandle& h, const MultiPoly& P, long M, const RiemannOptions& opt,
                             const Region* region) {
    if (M < 0) fail(Errc::ShapeError, "level must be nonnegative");
    if (P.nvars() != h.mu->n()) fail(Errc::ShapeError, "polynomial has the wrong number of variables");
    // p in the coefficient denominators: integrate p^delta P and divide
    long delta = 0;
    for (const auto& [e, c] : P.terms()) delta = std::max(delta, valuation(Integer(c.get_den()), Integer(h.p)));
    MultiPoly Ps = P * Rational(ppow(h.p, delta));
    SumSpec s;
    s.L = M;
    s.K = M + guard_digits(h, opt) + delta;
    Integer mod = ppow(h.p, s.K);
    ModPoly mp(Ps, h.p, mod);
    CellFn f = [&](const std::vector<Integer>& x, std::vector<Integer>& out) {
        out[0] = mp.eval(x, mod);
        return 0L;
    };
    PadicEstimate e = estimate(h, region, s, f, opt)[0];
    if (delta > 0) {
        long pr = e.value.precision() - delta;
        Integer r = e.value.residue();
        if (!mpz_divisible_p(r.get_mpz_t(), ppow(h.p, delta).get_mpz_t()))
            fail(Errc::NotPIntegral, "integral is not p-integral");
        mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), ppow(h.p, delta).get_mpz_t());
        e.value = PadicInt(h.p, pr, r);
        e.certified = std::max(0L, e.certified - delta);
    }
    return e;
}

Rational sublattice_exact(const MeasureHandle& h, const MultiPoly& P, const IntVec& a, const IntegerMatrix& M) {
    int n = h.mu->n();
    Integer d = det(M);
    if (d == 0) fail(Errc::SingularMatrix, "lattice matrix is singular");
    RatMatrix Mi = inverse(to_rat(M));
    GammaEllMatrix g(Mi, h.Z.ell);
    CocycleChain moved;
    for (const auto& t : h.Z.chain.terms()) moved.add(t.coeff, act_left(g, t.tuple));
    RatVec v(n);
    for (int i = 0; i < n; ++i) v[i] = h.Z.v[i] + a[i];
    CocycleArgs args{P.compose_linear(M), h.Z.Qsingle[0].act(Mi), Mi * v};
    return Rational(sgn(d)) * psi_ell_chain(moved, args, h.Z.ell);
}

namespace {

// x -> omega(u)^{-j} <u>^{-t} for the unit part u of y.
PadicInt weight_value(const PadicInt& u, const WeightPoint& s) {
    long p = u.p();
    PadicInt om = teichmuller(u);
    PadicInt ang = u * om.inverse();
    long j = s.j;
    long mod = p == 2 ? 2 : p - 1;
    long jj = ((-j) % mod + mod) % mod;
    PadicInt a = om.pow(static_cast<unsigned long>(jj));
    PadicInt b(p, u.precision(), 1);
    if (is_integer(s.t)) {
        Integer e = -s.t.get_num();
        PadicInt base = e < 0 ? ang.inverse() : ang;
        b = base.pow(Integer(abs(e)).get_ui());
    } else {
        PadicInt lg = iwasawa_log(ang);
        b = padic_exp(PadicInt::from_rational(-s.t, p, lg.precision()) * lg);
    }
    return a * b;
}

CellFn norm_cells(const MeasureHandle& h, const ModPoly& mp, const Integer& mod, long K,
                  const std::function<void(const PadicInt& u, std::vector<Integer>& out)>& g, long scale = 1) {
    long p = h.p;
    const ModPoly* P = &mp;
    Integer q = mod;
    return [P, q, p, K, g, scale](const std::vector<Integer>& x, std::vector<Integer>& out) -> long {
        Integer y = P->eval(x, q);
        if (y == 0) return -1;
        PadicInt u = PadicInt(p, K, y).unit_part();
        long c = K - u.precision();
        g(u, out);
        return c * scale;
    };
}

void check_weight(const WeightPoint& s, long p) {
    if (mpz_divisible_ui_p(s.t.get_den_mpz_t(), static_cast<unsigned long>(p)))
        fail(Errc::NotPIntegral, "weight-space parameter must be p-integral");
}

} // namespace

PadicEstimate padic_zeta(const MeasureHandle& h, const Region& region, const WeightPoint& s, long M,
                         const RiemannOptions& opt) {
    check_weight(s, h.p);
    SumSpec sp;
    sp.L = std::max<long>(M, region.t);
    sp.K = sp.L + guard_digits(h, opt);
    sp.stratified = true;
    sp.target = M;
    Integer mod = ppow(h.p, sp.K);
    ModPoly mp(h.Z.P, h.p, mod);
    CellFn f = norm_cells(h, mp, mod, sp.K, [&](const PadicInt& u, std::vector<Integer>& out) {
        out[0] = weight_value(u, s).residue();
    });
    return estimate(h, &region, sp, f, opt)[0];
}

std::vector<PadicEstimate> padic_zeta_minus_k(const MeasureHandle& h, const Region& region, const std::vector<long>& ks,
                                              long M, const RiemannOptions& opt) {
    for (long k : ks)
        if (k < 0) fail(Errc::ShapeError, "k must be nonnegative");
    if (ks.empty()) return {};
    SumSpec sp;
    sp.L = std::max<long>(M, region.t);
    sp.K = sp.L + guard_digits(h, opt);
    // u^k = (y / p^c)^k loses kc digits of the Riemann approximation
    sp.stratified = true;
    sp.target = M;
    sp.outputs = static_cast<int>(ks.size());
    long kmax = std::max(1L, *std::max_element(ks.begin(), ks.end()));
    Integer mod = ppow(h.p, sp.K);
    ModPoly mp(h.Z.P, h.p, mod);
    CellFn f = norm_cells(h, mp, mod, sp.K, [&](const PadicInt& u, std::vector<Integer>& out) {
        for (size_t i = 0; i < ks.size(); ++i) out[i] = u.pow(static_cast<unsigned long>(ks[i])).residue();
    }, kmax);
    return estimate(h, &region, sp, f, opt);
}

std::vector<PadicEstimate> oov_integral(const MeasureHandle& h, const std::vector<PiData>& pis, long kmax, long M,
                                        const RiemannOptions& opt) {
    if (kmax < 0) fail(Errc::ShapeError, "kmax must be nonnegative");
    for (const auto& d : pis) make_pi_data(d.P, h.f, d.pi);
    RegionParams prm;
    prm.pis = pis;
    Region R = region_build(h, RegionKind::Bold, prm);
    SumSpec sp;
    sp.L = std::max<long>(M, R.t);
    sp.K = sp.L + guard_digits(h, opt);
    sp.stratified = true;
    sp.refine = true;
    sp.target = M;
    sp.outputs = static_cast<int>(kmax + 1);
    Integer mod = ppow(h.p, sp.K);
    ModPoly mp(h.Z.P, h.p, mod);
    // log_p N x = log_p P(x) - log_p N(ac)
    PadicInt lac = iwasawa_log(PadicInt::from_rational(h.Z.a.norm() * h.Z.c.norm(), h.p, sp.K));
    CellFn f = norm_cells(h, mp, mod, sp.K, [&](const PadicInt& u, std::vector<Integer>& out) {
        PadicInt lg = iwasawa_log(u) - lac;
        PadicInt acc(h.p, lg.precision(), 1);
        for (long k = 0; k <= kmax; ++k) {
            out[k] = acc.residue();
            acc = acc * lg;
        }
    });
    return estimate(h, &R, sp, f, opt);
}

PadicInt root_of_unity(const ChiValue& x, long p, long M) {
    if (x.order < 1) fail(Errc::ShapeError, "root of unity order must be positive");
    long e = ((x.exponent % x.order) + x.order) % x.order;
    if (p == 2) {
        if (2 % x.order != 0) fail(Errc::ResidueFieldMismatch, "order " + std::to_string(x.order) + " does not embed in Q_2");
        return PadicInt(2, M, e == 0 ? 1 : -1);
    }
    if ((p - 1) % x.order != 0)
        fail(Errc::ResidueFieldMismatch, "order " + std::to_string(x.order) + " does not divide p - 1");
    std::vector<long> qs;
    long m = p - 1;
    for (long q = 2; q * q <= m; ++q)
        if (m % q == 0) {
            qs.push_back(q);
            while (m % q == 0) m /= q;
        }
    if (m > 1) qs.push_back(m);
    long g = 2;
    // least primitive root
    while (std::any_of(qs.begin(), qs.end(), [&](long q) { return pow_mod(Integer(g), Integer((p - 1) / q), Integer(p)) == 1; }))
        ++g;
    PadicInt w = teichmuller(PadicInt(p, M, g));
    return w.pow(static_cast<unsigned long>((p - 1) / x.order * e));
}

PadicEstimate L_assemble(const std::vector<ClassEntry>& classes, long p, const Rational& s, long M,
                         const RiemannOptions& opt) {
    if (classes.empty()) fail(Errc::MissingClassData, "no classes supplied");
    PadicEstimate out;
    bool first = true;
    for (const auto& c : classes) {
        if (!c.h) fail(Errc::MissingClassData, "class entry without measure data");
        if (!c.chi) fail(Errc::MissingClassData, "class entry without a character value");
        if (c.h->p != p) fail(Errc::ShapeError, "class data built for a different p");
        Region R = region_build(*c.h, RegionKind::UnitsF);
        PadicEstimate z = padic_zeta(*c.h, R, WeightPoint::cyclotomic(s), M, opt);
        PadicInt chi = root_of_unity(*c.chi, p, z.value.precision());
        PadicInt term = chi * z.value;
        if (first) {
            out = z;
            out.value = term;
            first = false;
        } else {
            out.value = out.value + term;
            out.certified = std::min(out.certified, z.certified);
            out.level = std::max(out.level, z.level);
            out.cells += z.cells;
        }
    }
    out.certified = std::min(out.certified, out.value.precision());
    return out;
}

} // namespace eis
