#include "eisenstein/numberfield.hpp"

#include "eisenstein/error.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace eis {

bool FieldElement::is_zero() const {
    for (const auto& x : c)
        if (x != 0) return false;
    return true;
}

namespace {

// ---- univariate rational polynomials (low to high) for Sturm sequences ----

using QPoly = RatVec;

void trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly derivative(const QPoly& p) {
    QPoly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
    trim(d);
    return d;
}

QPoly poly_rem(QPoly a, const QPoly& b) {
    trim(a);
    int db = static_cast<int>(b.size()) - 1;
    while (static_cast<int>(a.size()) - 1 >= db && !a.empty()) {
        int da = static_cast<int>(a.size()) - 1;
        Rational f = a.back() / b.back();
        for (int i = 0; i <= db; ++i) a[da - db + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

Rational eval_q(const QPoly& p, const Rational& x) {
    Rational r = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
    return r;
}

std::vector<QPoly> sturm_chain(const QPoly& f) {
    std::vector<QPoly> s{f, derivative(f)};
    while (true) {
        QPoly r = poly_rem(s[s.size() - 2], s.back());
        if (r.empty()) break;
        for (auto& x : r) x = -x;
        s.push_back(r);
    }
    return s;
}

int sign_changes(const std::vector<QPoly>& chain, const Rational& x) {
    int changes = 0, last = 0;
    for (const auto& p : chain) {
        int s = sgn(eval_q(p, x));
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

// ---- polynomials over F_p (low to high) ----

using PPoly = std::vector<long>;

long modp(long a, long p) {
    a %= p;
    return a < 0 ? a + p : a;
}

void ptrim(PPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

long inv_mod(long a, long p) {
    Integer r, A(a), P(p);
    if (mpz_invert(r.get_mpz_t(), A.get_mpz_t(), P.get_mpz_t()) == 0) fail(Errc::DivisionByZero, "non-invertible residue");
    return r.get_si();
}

PPoly pmul(const PPoly& a, const PPoly& b, long p) {
    if (a.empty() || b.empty()) return {};
    PPoly c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] = static_cast<long>((c[i + j] + static_cast<__int128>(a[i]) * b[j]) % p);
    ptrim(c);
    return c;
}

PPoly prem(PPoly a, const PPoly& m, long p) {
    ptrim(a);
    long li = inv_mod(m.back(), p);
    int dm = static_cast<int>(m.size()) - 1;
    while (!a.empty() && static_cast<int>(a.size()) - 1 >= dm) {
        int da = static_cast<int>(a.size()) - 1;
        long f = static_cast<long>(static_cast<__int128>(a.back()) * li % p);
        for (int i = 0; i <= dm; ++i) a[da - dm + i] = modp(a[da - dm + i] - static_cast<long>(static_cast<__int128>(f) * m[i] % p), p);
        ptrim(a);
    }
    return a;
}

PPoly pdiv(PPoly a, const PPoly& m, long p) {
    ptrim(a);
    int dm = static_cast<int>(m.size()) - 1;
    if (static_cast<int>(a.size()) - 1 < dm) return {};
    PPoly q(a.size() - m.size() + 1, 0);
    long li = inv_mod(m.back(), p);
    while (!a.empty() && static_cast<int>(a.size()) - 1 >= dm) {
        int da = static_cast<int>(a.size()) - 1;
        long f = static_cast<long>(static_cast<__int128>(a.back()) * li % p);
        q[da - dm] = f;
        for (int i = 0; i <= dm; ++i) a[da - dm + i] = modp(a[da - dm + i] - static_cast<long>(static_cast<__int128>(f) * m[i] % p), p);
        ptrim(a);
    }
    return q;
}

PPoly pgcd(PPoly a, PPoly b, long p) {
    ptrim(a);
    ptrim(b);
    while (!b.empty()) {
        PPoly r = prem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        long li = inv_mod(a.back(), p);
        for (auto& x : a) x = static_cast<long>(static_cast<__int128>(x) * li % p);
    }
    return a;
}

PPoly ppowmod(PPoly base, Integer e, const PPoly& m, long p) {
    PPoly r{1};
    base = prem(base, m, p);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = prem(pmul(r, base, p), m, p);
        e >>= 1;
        if (e > 0) base = prem(pmul(base, base, p), m, p);
    }
    return r;
}

PPoly psub(PPoly a, const PPoly& b, long p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) a[i] = modp(a[i] - b[i], p);
    ptrim(a);
    return a;
}

PPoly reduce_mod_p(const IntVec& f, long p) {
    PPoly r;
    for (const auto& c : f) r.push_back(mod_pos(c, Integer(p)).get_si());
    ptrim(r);
    return r;
}

// Degrees of the irreducible factors of a squarefree f mod p.
std::vector<int> factor_degrees_mod_p(const IntVec& f, long p) {
    PPoly g = reduce_mod_p(f, p);
    std::vector<int> degs;
    PPoly x{0, 1};
    PPoly h = x;
    for (int d = 1; 2 * d <= static_cast<int>(g.size()) - 1; ++d) {
        h = ppowmod(h, Integer(p), g, p);
        PPoly G = pgcd(psub(h, x, p), g, p);
        int dg = static_cast<int>(G.size()) - 1;
        if (dg > 0) {
            for (int k = 0; k < dg / d; ++k) degs.push_back(d);
            g = pdiv(g, G, p);
            h = prem(h, g, p);
        }
    }
    if (static_cast<int>(g.size()) - 1 > 0) degs.push_back(static_cast<int>(g.size()) - 1);
    return degs;
}

bool squarefree_mod_p(const IntVec& f, long p) {
    PPoly g = reduce_mod_p(f, p);
    PPoly dg;
    for (size_t i = 1; i < g.size(); ++i) dg.push_back(modp(g[i] * static_cast<long>(i), p));
    ptrim(dg);
    if (dg.empty()) return false;
    return pgcd(g, dg, p).size() == 1;
}

// ---- rational interval arithmetic ----

RatInterval iadd(const RatInterval& a, const RatInterval& b) { return {a.lo + b.lo, a.hi + b.hi}; }

RatInterval imul(const RatInterval& a, const RatInterval& b) {
    Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Integer isqrt(const Integer& n) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

} // namespace

// ---------------------------------------------------------------- NumberField

FieldPtr NumberField::create(const IntVec& f, bool trusted) {
    if (f.size() < 3) fail(Errc::DegreeError, "field polynomial must have degree >= 2");
    if (f.back() != 1) fail(Errc::NotMonic, "field polynomial must be monic");
    std::shared_ptr<NumberField> F(new NumberField());
    F->f_ = f;
    F->n_ = static_cast<int>(f.size()) - 1;
    int n = F->n_;

    // theta^k for k <= 2n-2
    F->theta_pow_.resize(2 * n - 1);
    for (int k = 0; k < 2 * n - 1; ++k) {
        RatVec c(n, Rational(0));
        if (k < n) {
            c[k] = 1;
        } else {
            const RatVec& prev = F->theta_pow_[k - 1].c;
            Rational top = prev[n - 1];
            for (int i = n - 1; i > 0; --i) c[i] = prev[i - 1];
            c[0] = 0;
            for (int i = 0; i < n; ++i) c[i] -= top * Rational(f[i]);
        }
        F->theta_pow_[k] = FieldElement{c};
    }
    // Newton power sums of the roots
    F->power_traces_.assign(2 * n - 1, Rational(0));
    F->power_traces_[0] = n;
    for (int k = 1; k < 2 * n - 1; ++k) {
        Rational s = 0;
        for (int i = 1; i <= std::min(k - 1, n); ++i) s += Rational(f[n - i]) * F->power_traces_[k - i];
        if (k <= n) s += Rational(f[n - k]) * k;
        F->power_traces_[k] = -s;
    }
    RatMatrix gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gram(i, j) = F->power_traces_[i + j];
    Rational d = det(gram);
    F->disc_f_ = d.get_num();
    if (F->disc_f_ == 0) fail(Errc::NotIrreducible, "polynomial is not squarefree");

    F->isolate_roots();

    if (!trusted) {
        if (n <= 3) {
            // a reducible monic cubic or quadratic has an integer root
            for (int i = 0; i < n; ++i) {
                F->refine(i, Rational(1, 4));
                RootInterval r = F->root_interval(i);
                Integer k = floor_of(r.hi);
                if (Rational(k) >= r.lo && F->eval_f(Rational(k)) == 0)
                    fail(Errc::NotIrreducible, "integer root " + k.get_str());
            }
        } else {
            // intersect the achievable factor degrees over several primes
            std::bitset<64> possible;
            possible.set();
            int used = 0;
            for (long p = 2; p < 2000 && used < 40; ++p) {
                if (!is_prime(p) || mpz_divisible_ui_p(F->disc_f_.get_mpz_t(), static_cast<unsigned long>(p))) continue;
                if (!squarefree_mod_p(f, p)) continue;
                ++used;
                std::bitset<64> sums;
                sums.set(0);
                for (int d : factor_degrees_mod_p(f, p)) sums |= (sums << d);
                possible &= sums;
            }
            for (int d = 1; d < n; ++d)
                if (possible.test(d)) fail(Errc::NotIrreducible, "irreducibility not certified by mod-p degree patterns");
        }
    }
    return F;
}

std::string NumberField::poly_str() const {
    std::ostringstream os;
    bool first = true;
    for (int k = n_; k >= 0; --k) {
        if (f_[k] == 0) continue;
        Integer c = f_[k];
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        Integer a = abs(c);
        if (a != 1 || k == 0) os << a.get_str();
        if (k > 0) os << (a != 1 ? "*" : "") << "t" << (k > 1 ? "^" + std::to_string(k) : "");
    }
    return os.str();
}

Rational NumberField::eval_f(const Rational& x) const {
    Rational r = 0;
    for (int k = n_; k >= 0; --k) r = r * x + Rational(f_[k]);
    return r;
}

void NumberField::isolate_roots() {
    QPoly f = to_rat(f_);
    auto chain = sturm_chain(f);
    Integer bound = 0;
    for (int i = 0; i < n_; ++i) bound = std::max(bound, Integer(abs(f_[i])));
    Rational B(bound + 1);
    int total = sign_changes(chain, -B) - sign_changes(chain, B);
    if (total != n_) fail(Errc::NotTotallyReal, "only " + std::to_string(total) + " of " + std::to_string(n_) + " roots are real");
    std::vector<RootInterval> out;
    std::vector<RootInterval> stack{{-B, B}};
    while (!stack.empty()) {
        RootInterval r = stack.back();
        stack.pop_back();
        int c = sign_changes(chain, r.lo) - sign_changes(chain, r.hi);
        if (c == 0) continue;
        if (c == 1) {
            out.push_back(r);
            continue;
        }
        Rational mid = (r.lo + r.hi) / 2;
        if (eval_f(mid) == 0) fail(Errc::NotIrreducible, "rational root " + to_string(mid));
        stack.push_back({r.lo, mid});
        stack.push_back({mid, r.hi});
    }
    std::sort(out.begin(), out.end(), [](const RootInterval& a, const RootInterval& b) { return a.lo < b.lo; });
    roots_ = out;
    sign_f_lo_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        int s = sgn(eval_f(roots_[i].lo));
        if (s == 0) fail(Errc::NotIrreducible, "rational root " + to_string(roots_[i].lo));
        sign_f_lo_[i] = s;
    }
    for (int i = 0; i < n_; ++i) refine(i, Rational(1, 1 << 30));
}

void NumberField::refine(int i, const Rational& width) const {
    std::lock_guard<std::mutex> lock(mu_);
    RootInterval r = roots_.at(i);
    int guard = 0;
    while (r.hi - r.lo > width) {
        if (++guard > 20000) fail(Errc::RefinementLimit, "root refinement did not converge");
        Rational mid = (r.lo + r.hi) / 2;
        int s = sgn(eval_f(mid));
        if (s == 0) fail(Errc::NotIrreducible, "rational root " + to_string(mid));
        if (s == sign_f_lo_[i]) r.lo = mid;
        else r.hi = mid;
    }
    if (r.hi - r.lo < roots_[i].hi - roots_[i].lo) roots_[i] = r;
}

RootInterval NumberField::root_interval(int i) const {
    std::lock_guard<std::mutex> lock(mu_);
    return roots_.at(i);
}

FieldElement NumberField::zero() const { return FieldElement{RatVec(n_, Rational(0))}; }
FieldElement NumberField::one() const { return from_rational(1); }
FieldElement NumberField::theta() const {
    FieldElement t = zero();
    t.c[1] = 1;
    return t;
}
FieldElement NumberField::from_rational(const Rational& q) const {
    FieldElement t = zero();
    t.c[0] = q;
    return t;
}
FieldElement NumberField::from_coords(RatVec c) const {
    if (static_cast<int>(c.size()) > n_) {
        // reduce a longer polynomial in theta
        FieldElement r = zero();
        for (size_t k = 0; k < c.size(); ++k) {
            if (c[k] == 0) continue;
            FieldElement tk = pow(theta(), static_cast<long>(k));
            r = add(r, scale(tk, c[k]));
        }
        return r;
    }
    c.resize(n_, Rational(0));
    return FieldElement{std::move(c)};
}
FieldElement NumberField::from_ints(const std::vector<long>& c) const {
    RatVec r;
    for (long x : c) r.emplace_back(x);
    return from_coords(r);
}

FieldElement NumberField::add(const FieldElement& a, const FieldElement& b) const {
    FieldElement r = a;
    for (int i = 0; i < n_; ++i) r.c[i] += b.c[i];
    return r;
}
FieldElement NumberField::sub(const FieldElement& a, const FieldElement& b) const {
    FieldElement r = a;
    for (int i = 0; i < n_; ++i) r.c[i] -= b.c[i];
    return r;
}
FieldElement NumberField::neg(const FieldElement& a) const { return scale(a, -1); }
FieldElement NumberField::scale(const FieldElement& a, const Rational& s) const {
    FieldElement r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

FieldElement NumberField::mul(const FieldElement& a, const FieldElement& b) const {
    RatVec prod(2 * n_ - 1, Rational(0));
    for (int i = 0; i < n_; ++i) {
        if (a.c[i] == 0) continue;
        for (int j = 0; j < n_; ++j)
            if (b.c[j] != 0) prod[i + j] += a.c[i] * b.c[j];
    }
    FieldElement r = zero();
    for (int k = 0; k < 2 * n_ - 1; ++k) {
        if (prod[k] == 0) continue;
        if (k < n_) {
            r.c[k] += prod[k];
        } else {
            for (int i = 0; i < n_; ++i) r.c[i] += prod[k] * theta_pow_[k].c[i];
        }
    }
    return r;
}

RatMatrix NumberField::mult_matrix(const FieldElement& a) const {
    RatMatrix m(n_, n_);
    FieldElement col = a;
    for (int j = 0; j < n_; ++j) {
        for (int i = 0; i < n_; ++i) m(i, j) = col.c[i];
        col = mul(col, theta());
    }
    return m;
}

FieldElement NumberField::inv(const FieldElement& a) const {
    if (a.is_zero()) fail(Errc::DivisionByZero, "inverse of zero field element");
    RatVec e(n_, Rational(0));
    e[0] = 1;
    return FieldElement{solve(mult_matrix(a), e)};
}

FieldElement NumberField::pow(const FieldElement& a, long e) const {
    if (e < 0) return pow(inv(a), -e);
    FieldElement r = one(), b = a;
    while (e) {
        if (e & 1) r = mul(r, b);
        e >>= 1;
        if (e) b = mul(b, b);
    }
    return r;
}

Rational NumberField::trace(const FieldElement& a) const {
    Rational t = 0;
    for (int i = 0; i < n_; ++i) t += a.c[i] * power_traces_[i];
    return t;
}

Rational NumberField::norm(const FieldElement& a) const { return det(mult_matrix(a)); }

RatVec NumberField::charpoly(const FieldElement& a) const {
    // Faddeev-LeVerrier
    RatMatrix A = mult_matrix(a);
    RatVec c(n_ + 1, Rational(0));
    c[n_] = 1;
    RatMatrix M(n_, n_);
    for (int k = 1; k <= n_; ++k) {
        RatMatrix AM = A * M;
        M = AM;
        for (int i = 0; i < n_; ++i) M(i, i) += c[n_ - k + 1];
        RatMatrix AMk = A * M;
        Rational tr = 0;
        for (int i = 0; i < n_; ++i) tr += AMk(i, i);
        c[n_ - k] = -tr / k;
    }
    return c;
}

bool NumberField::is_algebraic_integer(const FieldElement& a) const {
    for (const auto& x : charpoly(a))
        if (!is_integer(x)) return false;
    return true;
}

RatInterval NumberField::eval_interval(const FieldElement& a, const RootInterval& r) const {
    RatInterval t{r.lo, r.hi};
    RatInterval v{a.c[n_ - 1], a.c[n_ - 1]};
    for (int k = n_ - 2; k >= 0; --k) v = iadd(imul(v, t), RatInterval{a.c[k], a.c[k]});
    return v;
}

int NumberField::sign_at(const FieldElement& a, int embedding) const {
    if (a.is_zero()) return 0;
    if (embedding < 0 || embedding >= n_) fail(Errc::ShapeError, "embedding index out of range");
    // constant short-circuit
    bool constant = true;
    for (int i = 1; i < n_; ++i) constant = constant && a.c[i] == 0;
    if (constant) return sgn(a.c[0]);
    for (int round = 0; round < 400; ++round) {
        RootInterval r = root_interval(embedding);
        RatInterval v = eval_interval(a, r);
        if (sgn(v.lo) > 0) return 1;
        if (sgn(v.hi) < 0) return -1;
        refine(embedding, (r.hi - r.lo) / 65536);
    }
    fail(Errc::RefinementLimit, "sign could not be decided");
}

RatInterval NumberField::enclose(const FieldElement& a, int embedding, int bits) const {
    Rational w = Rational(1) / Rational(pow_z(Integer(2), static_cast<unsigned long>(bits)));
    refine(embedding, w);
    return eval_interval(a, root_interval(embedding));
}

double NumberField::approx(const FieldElement& a, int embedding) const {
    RatInterval v = enclose(a, embedding, 64);
    return Rational((v.lo + v.hi) / 2).get_d();
}

std::string NumberField::element_str(const FieldElement& a) const {
    std::ostringstream os;
    bool first = true;
    for (int k = 0; k < n_; ++k) {
        const Rational& c = a.c[k];
        if (c == 0) continue;
        if (!first) os << (sgn(c) < 0 ? " - " : " + ");
        else if (sgn(c) < 0) os << "-";
        first = false;
        Rational m = abs(c);
        if (k == 0) os << to_string(m);
        else {
            if (m != 1) os << to_string(m) << "*";
            os << "t" << (k > 1 ? "^" + std::to_string(k) : "");
        }
    }
    if (first) os << "0";
    return os.str();
}

RatMatrix lattice_hnf(const RatMatrix& cols, int n) {
    Integer d = 1;
    for (const auto& x : cols.data()) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
    IntegerMatrix m(cols.rows(), cols.cols());
    for (int i = 0; i < cols.rows(); ++i)
        for (int j = 0; j < cols.cols(); ++j) m(i, j) = Rational(cols(i, j) * d).get_num();
    IntegerMatrix h = hnf(m).H;
    int r = 0;
    for (int j = 0; j < h.cols(); ++j) {
        bool nz = false;
        for (int i = 0; i < h.rows(); ++i) nz = nz || h(i, j) != 0;
        if (nz) r = j + 1;
    }
    if (r != n) fail(Errc::ZeroIdeal, "lattice does not have full rank");
    RatMatrix out(cols.rows(), n);
    for (int i = 0; i < cols.rows(); ++i)
        for (int j = 0; j < n; ++j) out(i, j) = ratio(h(i, j), d);
    return out;
}

namespace {

RatMatrix columns_of(const std::vector<FieldElement>& v, int n) {
    RatMatrix m(n, static_cast<int>(v.size()));
    for (size_t j = 0; j < v.size(); ++j)
        for (int i = 0; i < n; ++i) m(i, static_cast<int>(j)) = v[j].c[i];
    return m;
}

std::vector<FieldElement> elements_of(const RatMatrix& m) {
    std::vector<FieldElement> v;
    for (int j = 0; j < m.cols(); ++j) v.push_back(FieldElement{m.col(j)});
    return v;
}

RatMatrix ring_closure(const NumberField& F, RatMatrix L) {
    int n = F.degree();
    while (true) {
        auto b = elements_of(L);
        std::vector<FieldElement> gens = b;
        for (size_t i = 0; i < b.size(); ++i)
            for (size_t j = i; j < b.size(); ++j) gens.push_back(F.mul(b[i], b[j]));
        RatMatrix L2 = lattice_hnf(columns_of(gens, n), n);
        if (L2 == L) return L;
        L = L2;
    }
}

} // namespace

const RatMatrix& NumberField::maximal_order() const {
    std::call_once(order_once_, [this] {
        int n = n_;
        RatMatrix O = RatMatrix::identity(n);
        for (const auto& [p, e] : factor_small(disc_f_)) {
            if (e < 2) continue;
            long pl = p.get_si();
            bool improved = true;
            while (improved) {
                improved = false;
                auto b = elements_of(O);
                std::vector<long> c(n, 0);
                while (true) {
                    int i = n - 1;
                    while (i >= 0 && ++c[i] == pl) c[i--] = 0;
                    if (i < 0) break;
                    FieldElement a = zero();
                    for (int k = 0; k < n; ++k)
                        if (c[k]) a = add(a, scale(b[k], ratio(Integer(c[k]), Integer(pl))));
                    if (is_algebraic_integer(a)) {
                        auto gens = b;
                        gens.push_back(a);
                        O = ring_closure(*this, lattice_hnf(columns_of(gens, n), n));
                        improved = true;
                        break;
                    }
                }
            }
        }
        order_ = O;
    });
    return order_;
}

Integer NumberField::index() const {
    Rational d = abs(det(maximal_order()));
    return Rational(1 / d).get_num();
}

Integer NumberField::discriminant() const {
    Integer i = index();
    return disc_f_ / (i * i);
}

std::vector<FieldElement> dual_basis(const NumberField& F, const std::vector<FieldElement>& w) {
    int n = F.degree();
    if (static_cast<int>(w.size()) != n) fail(Errc::SingularGram, "dual basis needs n elements");
    RatMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = F.trace(F.mul(w[i], w[j]));
    if (det(g) == 0) fail(Errc::SingularGram, "trace form is degenerate on w");
    RatMatrix gi = inverse(g);
    std::vector<FieldElement> out;
    for (int j = 0; j < n; ++j) {
        FieldElement x = F.zero();
        for (int k = 0; k < n; ++k) x = F.add(x, F.scale(w[k], gi(j, k)));
        out.push_back(x);
    }
    return out;
}

// ---------------------------------------------------------------- Ideal

Ideal Ideal::from_basis(FieldPtr F, const RatMatrix& cols) {
    Ideal I;
    int n = F->degree();
    I.B_ = lattice_hnf(cols, n);
    I.F_ = std::move(F);
    // O-module check
    auto ob = elements_of(I.F_->maximal_order());
    for (const auto& b : I.basis())
        for (const auto& o : ob)
            if (!I.contains(I.F_->mul(b, o))) fail(Errc::ShapeError, "lattice is not an O_F-module");
    return I;
}

Ideal Ideal::from_generators(FieldPtr F, const std::vector<FieldElement>& gens) {
    int n = F->degree();
    auto ob = elements_of(F->maximal_order());
    std::vector<FieldElement> all;
    for (const auto& g : gens)
        for (const auto& o : ob) all.push_back(F->mul(g, o));
    bool any = false;
    for (const auto& g : gens) any = any || !g.is_zero();
    if (!any) fail(Errc::ZeroIdeal, "ideal generated by zero");
    Ideal I;
    I.B_ = lattice_hnf(columns_of(all, n), n);
    I.F_ = std::move(F);
    return I;
}

Ideal Ideal::from_two_generators(FieldPtr F, const Integer& g1, const FieldElement& g2) {
    FieldElement a = F->from_rational(Rational(g1));
    return from_generators(std::move(F), {a, g2});
}

Ideal Ideal::principal(FieldPtr F, const FieldElement& x) { return from_generators(std::move(F), {x}); }

Ideal Ideal::unit(FieldPtr F) {
    Ideal I;
    I.B_ = F->maximal_order();
    I.F_ = std::move(F);
    return I;
}

std::vector<FieldElement> Ideal::basis() const { return elements_of(B_); }

Rational Ideal::norm() const { return abs(det(B_)) / abs(det(F_->maximal_order())); }

RatVec Ideal::coordinates(const FieldElement& x) const { return solve(B_, x.c); }

bool Ideal::contains(const FieldElement& x) const {
    for (const auto& c : coordinates(x))
        if (!is_integer(c)) return false;
    return true;
}

bool Ideal::is_integral() const {
    Ideal O = unit(F_);
    for (const auto& b : basis())
        if (!O.contains(b)) return false;
    return true;
}

bool Ideal::is_theta_stable() const {
    for (const auto& b : basis())
        if (!contains(F_->mul(b, F_->theta()))) return false;
    return true;
}

Ideal Ideal::operator*(const Ideal& o) const {
    int n = F_->degree();
    std::vector<FieldElement> prods;
    auto a = basis(), b = o.basis();
    for (const auto& x : a)
        for (const auto& y : b) prods.push_back(F_->mul(x, y));
    Ideal I;
    I.F_ = F_;
    I.B_ = lattice_hnf(columns_of(prods, n), n);
    return I;
}

Ideal Ideal::operator+(const Ideal& o) const {
    int n = F_->degree();
    auto a = basis(), b = o.basis();
    a.insert(a.end(), b.begin(), b.end());
    Ideal I;
    I.F_ = F_;
    I.B_ = lattice_hnf(columns_of(a, n), n);
    return I;
}

namespace {

RatMatrix dual_lattice(const NumberField& F, const RatMatrix& B) {
    return columns_of(dual_basis(F, elements_of(B)), F.degree());
}

} // namespace

Ideal Ideal::inverse() const {
    int n = F_->degree();
    // I^{-1} = (I * O^vee)^vee with ^vee the trace dual
    Ideal codiff;
    codiff.F_ = F_;
    codiff.B_ = lattice_hnf(dual_lattice(*F_, F_->maximal_order()), n);
    Ideal t = (*this) * codiff;
    Ideal r;
    r.F_ = F_;
    r.B_ = lattice_hnf(dual_lattice(*F_, t.B_), n);
    return r;
}

Ideal Ideal::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Ideal r = unit(F_), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

std::string Ideal::str() const { return to_string(B_); }

bool is_coprime(const Ideal& a, const Ideal& b) { return (a + b) == Ideal::unit(a.field()); }

bool congruent_mod_ideal(const FieldElement& x, const FieldElement& y, const Ideal& I) {
    return I.contains(I.field()->sub(x, y));
}

// ---------------------------------------------------------------- primes

namespace {

long eval_mod(const IntVec& f, long x, long p) {
    Integer r = 0;
    for (auto it = f.rbegin(); it != f.rend(); ++it) r = mod_pos(r * x + *it, Integer(p));
    return r.get_si();
}

FieldElement lift_poly(const NumberField& F, const PPoly& g) {
    RatVec c;
    for (long x : g) c.emplace_back(x);
    return F.from_coords(c);
}

} // namespace

Ideal prime_over(FieldPtr F, long ell) {
    if (!is_prime(ell)) fail(Errc::IndexNotPrime, std::to_string(ell) + " is not prime");
    if (mpz_divisible_ui_p(F->index().get_mpz_t(), static_cast<unsigned long>(ell)))
        fail(Errc::IndexDivisor, std::to_string(ell) + " divides [O_F : Z[theta]]; supply c explicitly");
    for (long c = 0; c < ell; ++c) {
        if (eval_mod(F->poly(), c, ell) != 0) continue;
        FieldElement g = F->sub(F->theta(), F->from_rational(c));
        Ideal P = Ideal::from_two_generators(F, Integer(ell), g);
        if (P.norm() != ell) fail(Errc::IndexDivisor, "(l, theta - c) does not have norm l");
        return P;
    }
    fail(Errc::NoDegreeOnePrime, "f has no root mod " + std::to_string(ell));
}

std::vector<PrimeFactor> primes_above(FieldPtr F, long p) {
    if (!is_prime(p)) fail(Errc::IndexNotPrime, std::to_string(p) + " is not prime");
    if (mpz_divisible_ui_p(F->index().get_mpz_t(), static_cast<unsigned long>(p)))
        fail(Errc::Unsupported, std::to_string(p) + " divides the index; prime decomposition must be supplied");
    int n = F->degree();
    PPoly rem = reduce_mod_p(F->poly(), p);
    std::vector<std::pair<PPoly, int>> factors;
    for (int d = 1; 2 * d <= static_cast<int>(rem.size()) - 1; ++d) {
        double count = std::pow(static_cast<double>(p), d);
        if (count > 2e6) fail(Errc::Unsupported, "factorization mod p too large for trial division");
        std::vector<long> c(d, 0);
        while (true) {
            PPoly g(c.begin(), c.end());
            g.push_back(1);
            int mult = 0;
            while (static_cast<int>(rem.size()) - 1 >= d && prem(rem, g, p).empty()) {
                rem = pdiv(rem, g, p);
                ++mult;
            }
            if (mult) factors.emplace_back(g, mult);
            int i = d - 1;
            while (i >= 0 && ++c[i] == p) c[i--] = 0;
            if (i < 0) break;
        }
    }
    if (static_cast<int>(rem.size()) - 1 > 0) factors.emplace_back(rem, 1);
    std::vector<PrimeFactor> out;
    Ideal prod = Ideal::unit(F);
    for (const auto& [g, e] : factors) {
        Ideal P = Ideal::from_two_generators(F, Integer(p), lift_poly(*F, g));
        int deg = static_cast<int>(g.size()) - 1;
        if (P.norm() != Rational(pow_z(Integer(p), static_cast<unsigned long>(deg))))
            fail(Errc::Unsupported, "Kummer-Dedekind ideal has unexpected norm");
        out.push_back({P, e, deg});
        prod = prod * P.pow(e);
    }
    if (prod != Ideal::principal(F, F->from_rational(p))) fail(Errc::Unsupported, "prime decomposition check failed");
    (void)n;
    return out;
}

// ---------------------------------------------------------------- adapted basis

std::vector<FieldElement> adapted_basis(const Ideal& a, const Ideal& f, const Ideal& c, long ell) {
    const FieldPtr& F = a.field();
    int n = F->degree();
    if (c.norm() != ell) fail(Errc::IndexNotPrime, "N(c) != l");
    Ideal L1 = a.inverse() * f;
    Ideal L2 = L1 * c.inverse();
    RatMatrix C = inverse(L2.basis_matrix()) * L1.basis_matrix();
    if (!is_integral(C)) fail(Errc::IndexNotPrime, "a^-1 f is not contained in a^-1 c^-1 f");
    IntegerMatrix Ci = to_integer(C);
    if (abs(det(Ci)) != ell) fail(Errc::IndexNotPrime, "inclusion index is not l");
    // left kernel of C mod l: rows of C^t, solve C^t phi = 0 over F_l
    std::vector<std::vector<long>> m(n, std::vector<long>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = mod_pos(Ci(j, i), Integer(ell)).get_si();
    // row reduce
    std::vector<int> pivcol;
    int r = 0;
    for (int col = 0; col < n && r < n; ++col) {
        int p = -1;
        for (int i = r; i < n; ++i)
            if (m[i][col]) { p = i; break; }
        if (p < 0) continue;
        std::swap(m[r], m[p]);
        long iv = inv_mod(m[r][col], ell);
        for (auto& x : m[r]) x = x * iv % ell;
        for (int i = 0; i < n; ++i) {
            if (i == r || !m[i][col]) continue;
            long fct = m[i][col];
            for (int j = 0; j < n; ++j) m[i][j] = modp(m[i][j] - fct * m[r][j], ell);
        }
        pivcol.push_back(col);
        ++r;
    }
    if (r != n - 1) fail(Errc::IndexNotPrime, "unexpected rank mod l");
    int freecol = -1;
    for (int col = 0; col < n; ++col)
        if (std::find(pivcol.begin(), pivcol.end(), col) == pivcol.end()) { freecol = col; break; }
    std::vector<long> phi(n, 0);
    phi[freecol] = 1;
    for (int i = 0; i < r; ++i) phi[pivcol[i]] = modp(-m[i][freecol], ell);
    int k = 0;
    while (phi[k] == 0) ++k;
    long ik = inv_mod(phi[k], ell);
    auto u = L2.basis();
    std::vector<FieldElement> w;
    w.push_back(F->scale(u[k], ell));
    for (int i = 0; i < n; ++i) {
        if (i == k) continue;
        long ci = phi[i] * ik % ell;
        w.push_back(F->sub(u[i], F->scale(u[k], ci)));
    }
    // verify both lattices
    RatMatrix W = columns_of(w, n);
    if (lattice_hnf(W, n) != L1.basis_matrix()) fail(Errc::IndexNotPrime, "adapted basis does not span a^-1 f");
    RatMatrix W2 = W;
    for (int i = 0; i < n; ++i) W2(i, 0) /= ell;
    if (lattice_hnf(W2, n) != L2.basis_matrix()) fail(Errc::IndexNotPrime, "adapted basis does not span a^-1 c^-1 f");
    return w;
}

// ---------------------------------------------------------------- units

FieldElement fundamental_unit_quadratic(FieldPtr F) {
    if (F->degree() != 2) fail(Errc::UnitsRequired, "fundamental unit computation only for n = 2");
    const IntVec& f = F->poly();
    Integer D = F->discriminant();
    Integer idx = F->index();
    // sqrt(D) = (2 theta + b) / index, positive at the larger root
    FieldElement sqrtD = F->scale(F->add(F->scale(F->theta(), 2), F->from_rational(Rational(f[1]))), Rational(1) / Rational(idx));
    FieldElement omega = F->scale(F->add(F->from_rational(Rational(D)), sqrtD), Rational(1, 2));
    Integer s = isqrt(D);
    Integer P = D, Q = 2;
    Integer p1 = 1, p2 = 0, q1 = 0, q2 = 1;
    for (int it = 0; it < 100000; ++it) {
        Integer a = (Q > 0) ? floor_div(P + s, Q) : floor_div(P + s + 1, Q);
        Integer pk = a * p1 + p2, qk = a * q1 + q2;
        p2 = p1; p1 = pk; q2 = q1; q1 = qk;
        FieldElement u = F->sub(F->from_rational(Rational(pk)), F->scale(omega, Rational(qk)));
        Rational N = F->norm(u);
        if (abs(N) == 1 && qk != 0) {
            // orient: > 1 at the larger embedding
            std::vector<FieldElement> cands{u, F->neg(u), F->inv(u), F->neg(F->inv(u))};
            for (const auto& c : cands)
                if (F->sign_at(F->sub(c, F->one()), 1) > 0) return c;
        }
        Integer Pn = a * Q - P;
        Integer Qn = (D - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
    }
    fail(Errc::Unsupported, "continued fraction did not produce a unit");
}

namespace {

struct DInt {
    double lo, hi;
};

DInt widen(double lo, double hi) {
    double e = 1e-15 * (1 + std::max(std::fabs(lo), std::fabs(hi)));
    return {lo - e, hi + e};
}

DInt dadd(DInt a, DInt b) { return widen(a.lo + b.lo, a.hi + b.hi); }
DInt dmul(DInt a, DInt b) {
    double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

template <class T, class Add, class Mul>
T leibniz_det(const std::vector<std::vector<T>>& m, T zero, T one, T minus_one, Add add, Mul mul) {
    int n = static_cast<int>(m.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    T total = zero;
    do {
        int inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) inv += perm[i] > perm[j];
        T term = (inv % 2) ? minus_one : one;
        for (int i = 0; i < n; ++i) term = mul(term, m[i][perm[i]]);
        total = add(total, term);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

} // namespace

int sign_det_embeddings(const NumberField& F, const std::vector<FieldElement>& w) {
    int n = F.degree();
    for (int bits = 64; bits <= 8192; bits *= 2) {
        std::vector<std::vector<RatInterval>> m(n, std::vector<RatInterval>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m[i][j] = F.enclose(w[j], i, bits);
        RatInterval d = leibniz_det<RatInterval>(m, {0, 0}, {1, 1}, {-1, -1}, iadd, imul);
        if (sgn(d.lo) > 0) return 1;
        if (sgn(d.hi) < 0) return -1;
    }
    fail(Errc::SingularGram, "embedding determinant could not be separated from 0");
}

int sign_det_log_units(const NumberField& F, const std::vector<FieldElement>& eps) {
    int n = F.degree();
    int r = n - 1;
    if (static_cast<int>(eps.size()) != r) fail(Errc::DependentUnits, "need n-1 units");
    if (r == 1) {
        // log tau_0(eps) compared with 0 exactly: eps totally positive
        int s = F.sign_at(F.sub(eps[0], F.one()), 0);
        if (s == 0) fail(Errc::DependentUnits, "unit is 1");
        return s;
    }
    for (int bits = 80; bits <= 320; bits *= 2) {
        std::vector<std::vector<DInt>> m(r, std::vector<DInt>(r));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                RatInterval v = F.enclose(eps[j], i, bits);
                double lo = std::fabs(v.lo.get_d()), hi = std::fabs(v.hi.get_d());
                if (lo > hi) std::swap(lo, hi);
                if (!(lo > 0)) fail(Errc::DependentUnits, "unit enclosure touches 0");
                double a = std::log(lo), b = std::log(hi);
                m[i][j] = widen(std::nextafter(a, -INFINITY), std::nextafter(b, INFINITY));
            }
        DInt d = leibniz_det<DInt>(m, {0, 0}, {1, 1}, {-1, -1}, dadd, dmul);
        if (d.lo > 0) return 1;
        if (d.hi < 0) return -1;
    }
    fail(Errc::DependentUnits, "regulator determinant not certified nonzero");
}

UnitData unit_basis(FieldPtr F, const Ideal& f, const std::optional<std::vector<FieldElement>>& supplied) {
    int n = F->degree();
    UnitData out;
    auto totally_positive = [&](const FieldElement& x) {
        for (int i = 0; i < n; ++i)
            if (F->sign_at(x, i) <= 0) return false;
        return true;
    };
    if (supplied) {
        if (static_cast<int>(supplied->size()) != n - 1) fail(Errc::DependentUnits, "expected n-1 units");
        for (const auto& e : *supplied) {
            if (!F->is_algebraic_integer(e) || abs(F->norm(e)) != 1) fail(Errc::NotTotallyPositive, "supplied element is not a unit");
            if (!totally_positive(e)) fail(Errc::NotTotallyPositive, "unit " + F->element_str(e) + " is not totally positive");
            if (!congruent_mod_ideal(e, F->one(), f)) fail(Errc::NotCongruentOne, "unit " + F->element_str(e) + " is not 1 mod f");
        }
        out.eps = *supplied;
    } else {
        if (n != 2) fail(Errc::UnitsRequired, "units must be supplied for n >= 3");
        FieldElement e0 = fundamental_unit_quadratic(F);
        Integer nf = f.norm().get_num();
        long bound = 4 * std::max<long>(1, nf.get_si()) + 4;
        FieldElement pw = F->one();
        bool found = false;
        for (long k = 1; k <= bound && !found; ++k) {
            pw = F->mul(pw, e0);
            for (int s : {1, -1}) {
                FieldElement c = F->scale(pw, s);
                if (totally_positive(c) && congruent_mod_ideal(c, F->one(), f)) {
                    out.eps = {c};
                    found = true;
                    break;
                }
            }
        }
        if (!found) fail(Errc::NotFoundWithinBound, "no totally positive unit = 1 mod f within bound");
    }
    out.sign_det_R = sign_det_log_units(*F, out.eps);
    return out;
}

GeneratorResult totally_positive_generator(const Ideal& I, const Ideal& f, int bound,
                                           const std::optional<std::vector<FieldElement>>& units) {
    const FieldPtr& F = I.field();
    int n = F->degree();
    if (!I.is_integral()) fail(Errc::ShapeError, "generator search needs an integral ideal");
    std::vector<FieldElement> eps;
    if (units) eps = *units;
    else eps = unit_basis(F, f).eps;
    // box radius from the unit fundamental domain
    double H = 1;
    for (const auto& e : eps) {
        double m = 1;
        for (int j = 0; j < n; ++j) {
            double t = F->approx(e, j);
            m = std::max(m, std::max(t, 1 / t));
        }
        H *= m;
    }
    Ideal J = Ideal::unit(F);
    for (int e = 1; e <= bound; ++e) {
        J = J * I;
        Rational N = J.norm();
        double R = std::pow(N.get_d(), 1.0 / n) * H * (1 + 1e-9) + 1e-9;
        auto b = J.basis();
        std::vector<std::vector<double>> E(n, std::vector<double>(n));
        RatMatrix Er(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                E[j][k] = F->approx(b[k], j);
                Er(j, k) = Rational(E[j][k]);
            }
        RatMatrix Einv = inverse(Er);
        std::vector<long> C(n);
        double box = 1;
        for (int k = 0; k < n; ++k) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += std::fabs(Einv(k, j).get_d()) * R;
            C[k] = static_cast<long>(std::floor(s)) + 1;
            box *= 2.0 * C[k] + 1;
        }
        if (box > 2e7) fail(Errc::NotFoundWithinBound, "generator search box too large");
        std::vector<long> c(n);
        for (int k = 0; k < n; ++k) c[k] = -C[k];
        std::optional<FieldElement> best;
        Rational best_tr;
        while (true) {
            bool ok = true;
            std::vector<double> tv(n, 0);
            for (int j = 0; j < n && ok; ++j) {
                for (int k = 0; k < n; ++k) tv[j] += E[j][k] * c[k];
                ok = tv[j] > 0 && tv[j] <= R * (1 + 1e-6);
            }
            if (ok) {
                FieldElement a = F->zero();
                for (int k = 0; k < n; ++k)
                    if (c[k]) a = F->add(a, F->scale(b[k], c[k]));
                if (F->norm(a) == N) {
                    bool pos = true;
                    for (int j = 0; j < n && pos; ++j) pos = F->sign_at(a, j) > 0;
                    if (pos && congruent_mod_ideal(a, F->one(), f)) {
                        Rational tr = F->trace(a);
                        if (!best || tr < best_tr || (tr == best_tr && a.c < best->c)) {
                            best = a;
                            best_tr = tr;
                        }
                    }
                }
            }
            int k = n - 1;
            while (k >= 0 && ++c[k] > C[k]) {
                c[k] = -C[k];
                --k;
            }
            if (k < 0) break;
        }
        if (best) return {e, *best};
    }
    fail(Errc::NotFoundWithinBound, "no totally positive generator = 1 mod f for I^e, e <= " + std::to_string(bound));
}

} // namespace eis
