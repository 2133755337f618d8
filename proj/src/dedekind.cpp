#include "eisenstein/dedekind.hpp"

#include "eisenstein/error.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

namespace eis {

namespace {

long mod_l(const Integer& x, long ell) { return mod_pos(x, Integer(ell)).get_si(); }

long mod_l(long x, long ell) {
    long r = x % ell;
    return r < 0 ? r + ell : r;
}

long inv_mod_l(long a, long ell) {
    Integer r, A(a), P(ell);
    if (mpz_invert(r.get_mpz_t(), A.get_mpz_t(), P.get_mpz_t()) == 0) fail(Errc::InvalidLinearForm, "residue not invertible");
    return r.get_si();
}

Integer common_denominator(const RatVec& v) {
    Integer d = 1;
    for (const auto& x : v) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
    return d;
}

void check_shapes(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v) {
    int n = sigma.rows();
    if (!sigma.square() || static_cast<int>(e.size()) != n || static_cast<int>(v.size()) != n || S.cols() != n)
        fail(Errc::ShapeError, "Dedekind sum argument shapes disagree");
    for (int x : e)
        if (x < 1) fail(Errc::ShapeError, "exponent tuple entries must be positive");
}

// Calls fn(Y) for every canonical coset rep x of Z^n / sigma Z^n with
// Y = adj(sigma) (den x + w). The point is sigma^{-1}(x + w/den) = Y / (det den).
template <class Fn>
void for_each_coset_image(const IntegerMatrix& sigma, const Integer& den, const IntVec& w, Fn&& fn) {
    int n = sigma.rows();
    IntegerMatrix h = hnf(sigma).H;
    IntegerMatrix adj = adjugate(sigma);
    IntVec Y = adj * w;
    std::vector<Integer> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = h(i, i);
    IntVec x(n, 0);
    while (true) {
        fn(static_cast<const IntVec&>(Y), static_cast<const IntVec&>(x));
        int i = n - 1;
        while (i >= 0) {
            x[i] += 1;
            for (int r = 0; r < n; ++r) Y[r] += den * adj(r, i);
            if (x[i] < diag[i]) break;
            for (int r = 0; r < n; ++r) Y[r] -= den * adj(r, i) * diag[i];
            x[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
}

RatVec pi_ell(RatVec v, long ell) {
    v[0] *= ell;
    return v;
}

} // namespace

// ---------------------------------------------------------------- L

LinearFormModL::LinearFormModL(long ell, std::vector<long> a) : ell_(ell), a_(std::move(a)) {
    if (!is_prime(ell)) fail(Errc::InvalidLinearForm, "level must be prime");
    for (auto& x : a_) {
        x = mod_l(x, ell);
        if (x == 0) fail(Errc::InvalidLinearForm, "linear form has a value divisible by l on a basis vector");
    }
}

long LinearFormModL::eval(const IntVec& y) const {
    Integer s = 0;
    for (int j = 0; j < n(); ++j) s += y[j] * a_[j];
    return mod_l(s, ell_);
}

// ---------------------------------------------------------------- forms

FormsMatrix FormsMatrix::rational(const RatMatrix& q) {
    FormsMatrix f;
    f.m_ = q.rows();
    f.n_ = q.cols();
    f.rat_ = q.data();
    return f;
}

FormsMatrix FormsMatrix::embedded(FieldPtr F, const std::vector<std::vector<FieldElement>>& rows,
                                  const std::vector<int>& embeddings) {
    FormsMatrix f;
    f.m_ = static_cast<int>(rows.size());
    f.n_ = f.m_ ? static_cast<int>(rows[0].size()) : 0;
    if (static_cast<int>(embeddings.size()) != f.m_) fail(Errc::ShapeError, "one embedding per form required");
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != f.n_) fail(Errc::ShapeError, "ragged forms matrix");
        for (const auto& x : r) f.fe_.push_back(x);
    }
    for (int e : embeddings)
        if (e < 0 || e >= F->degree()) fail(Errc::ShapeError, "embedding index out of range");
    f.emb_ = embeddings;
    f.F_ = std::move(F);
    return f;
}

int FormsMatrix::sign(int i, int j) const {
    size_t k = static_cast<size_t>(i) * n_ + j;
    if (is_rational()) return sgn(rat_[k]);
    return F_->sign_at(fe_[k], emb_[i]);
}

SignMatrix FormsMatrix::signs() const {
    std::vector<int8_t> s;
    s.reserve(static_cast<size_t>(m_) * n_);
    for (int i = 0; i < m_; ++i)
        for (int j = 0; j < n_; ++j) {
            int x = sign(i, j);
            if (x == 0) fail(Errc::ZeroFormValue, "linear form vanishes at a lattice direction (entry " + std::to_string(i) + "," + std::to_string(j) + ")");
            s.push_back(static_cast<int8_t>(x));
        }
    return SignMatrix(m_, n_, s);
}

FormsMatrix FormsMatrix::act(const RatMatrix& M) const {
    if (M.cols() != n_) fail(Errc::ShapeError, "forms action shape");
    FormsMatrix r = *this;
    int nn = M.rows();
    r.n_ = nn;
    if (is_rational()) {
        r.rat_.assign(static_cast<size_t>(m_) * nn, Rational(0));
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < nn; ++j) {
                Rational s = 0;
                for (int k = 0; k < n_; ++k) s += rat_[static_cast<size_t>(i) * n_ + k] * M(j, k);
                r.rat_[static_cast<size_t>(i) * nn + j] = s;
            }
    } else {
        r.fe_.assign(static_cast<size_t>(m_) * nn, F_->zero());
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < nn; ++j) {
                FieldElement s = F_->zero();
                for (int k = 0; k < n_; ++k)
                    if (M(j, k) != 0) s = F_->add(s, F_->scale(fe_[static_cast<size_t>(i) * n_ + k], M(j, k)));
                r.fe_[static_cast<size_t>(i) * nn + j] = s;
            }
    }
    return r;
}

FormsMatrix FormsMatrix::negated() const {
    FormsMatrix r = *this;
    for (int i = 0; i < m_; ++i) r = r.scale_row(i, -1);
    return r;
}

FormsMatrix FormsMatrix::scale_row(int i, const Rational& c) const {
    FormsMatrix r = *this;
    for (int j = 0; j < n_; ++j) {
        size_t k = static_cast<size_t>(i) * n_ + j;
        if (is_rational()) r.rat_[k] *= c;
        else r.fe_[k] = F_->scale(fe_[k], c);
    }
    return r;
}

std::string FormsMatrix::entry_str(int i, int j) const {
    size_t k = static_cast<size_t>(i) * n_ + j;
    if (is_rational()) return to_string(rat_[k]);
    return F_->element_str(fe_[k]);
}

SignMatrix sign_of_inverse_action(const IntegerMatrix& sigma, const FormsMatrix& Q) {
    return Q.act(inverse(to_rat(sigma))).signs();
}

IntegerMatrix sigma_ell(const IntegerMatrix& sigma, long ell) {
    IntegerMatrix s = sigma;
    for (int i = 1; i < s.rows(); ++i)
        for (int j = 0; j < s.cols(); ++j) {
            if (!mpz_divisible_ui_p(s(i, j).get_mpz_t(), static_cast<unsigned long>(ell)))
                fail(Errc::ShapeError, "sigma_l is not integral: rows 2..n of sigma must be divisible by l");
            s(i, j) /= ell;
        }
    return s;
}

// ---------------------------------------------------------------- D sums

Rational d_sum(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v, bool plus) {
    check_shapes(sigma, e, S, v);
    Integer d = det(sigma);
    if (d == 0) return 0;
    int n = sigma.rows();
    int m = S.rows();
    Integer den = common_denominator(v);
    IntVec w(n);
    for (int i = 0; i < n; ++i) w[i] = Rational(v[i] * den).get_num();
    Integer D = d * den;
    Integer absD = abs(D);
    // Each factor B_{e_j}(t/|D|) is kept as the integer L_j |D|^{e_j} B_{e_j}(t/|D|).
    int kmax = *std::max_element(e.begin(), e.end());
    std::vector<Integer> Dpow(kmax + 1, Integer(1));
    for (int i = 1; i <= kmax; ++i) Dpow[i] = Dpow[i - 1] * absD;
    std::vector<std::vector<Integer>> coef(n);
    Integer Lprod = 1;
    for (int j = 0; j < n; ++j) {
        const RatVec& c = bernoulli_coeffs(e[j]);
        Integer L = 1;
        for (const auto& x : c) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), x.get_den_mpz_t());
        for (const auto& x : c) coef[j].push_back(Rational(x * L).get_num());
        Lprod *= L;
    }
    // sum over rows of prod_{j in mask} S(i,j)
    unsigned masks = 1u << n;
    std::vector<long> signsum(masks, 0);
    for (unsigned mask = 0; mask < masks; ++mask) {
        long tot = 0;
        for (int i = 0; i < m; ++i) {
            int sg = 1;
            for (int j = 0; j < n; ++j)
                if (mask >> j & 1u) sg *= S(i, j);
            tot += sg;
        }
        if (plus && __builtin_popcount(mask) % 2 == 1) tot = 0;
        signsum[mask] = tot;
    }
    Integer total = 0, prod, t, r;
    for_each_coset_image(sigma, den, w, [&](const IntVec& Y, const IntVec&) {
        unsigned mask = 0;
        prod = 1;
        for (int j = 0; j < n; ++j) {
            t = Y[j] * sgn(D);
            mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), absD.get_mpz_t());
            if (e[j] == 1 && t == 0) {
                mask |= 1u << j;
                prod *= absD;
                continue;
            }
            int k = e[j];
            const auto& c = coef[j];
            r = c[k];
            for (int i = k - 1; i >= 0; --i) r = r * t + c[i] * Dpow[k - i];
            prod *= r;
            if (prod == 0) return;
        }
        if (signsum[mask] == 0) return;
        total += prod * signsum[mask];
    });
    return ratio(total, Integer(m) * Dpow[0] * pow_z(absD, static_cast<unsigned long>(weight(e))) * Lprod);
}

Rational d_plus(const IntegerMatrix& sigma, const ExponentTuple& e, const FormsMatrix& Q, const RatVec& v) {
    if (det(sigma) == 0) return 0;
    return d_sum(sigma, e, sign_of_inverse_action(sigma, Q), v, true);
}

Rational d_ell_signs(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v, long ell,
                     bool plus) {
    check_shapes(sigma, e, S, v);
    int n = sigma.rows();
    if (n < 2) fail(Errc::ShapeError, "smoothed Dedekind sums need n >= 2");
    IntegerMatrix sl = sigma_ell(sigma, ell);
    if (det(sigma) == 0) return 0;
    Rational a = d_sum(sl, e, S, pi_ell(v, ell), plus);
    Rational b = d_sum(sigma, e, S, v, plus);
    return a - pow_q(Rational(ell), 1 - n + weight(e)) * b;
}

Rational d_ell(const IntegerMatrix& sigma, const ExponentTuple& e, const FormsMatrix& Q, const RatVec& v, long ell) {
    if (det(sigma) == 0) return 0;
    return d_ell_signs(sigma, e, sign_of_inverse_action(sigma, Q), v, ell, false);
}

Rational d_ell_plus(const IntegerMatrix& sigma, const ExponentTuple& e, const FormsMatrix& Q, const RatVec& v, long ell) {
    if (det(sigma) == 0) return 0;
    return d_ell_signs(sigma, e, sign_of_inverse_action(sigma, Q), v, ell, true);
}

Rational d_ell_decomposed(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v,
                          long ell) {
    check_shapes(sigma, e, S, v);
    int n = sigma.rows();
    if (det(sigma) == 0) return 0;
    IntegerMatrix sl = sigma_ell(sigma, ell);
    std::vector<long> a(n);
    for (int j = 0; j < n; ++j) a[j] = mod_l(sigma(0, j), ell);
    LinearFormModL L(ell, a);
    RatMatrix sli = inverse(to_rat(sl));
    RatVec pv = pi_ell(v, ell);
    Rational total = 0;
    for (const auto& x : coset_reps(sl)) {
        RatVec t(n);
        for (int i = 0; i < n; ++i) t[i] = Rational(x[i]) + pv[i];
        total += b_L_z_direct(e, L, mod_l(Integer(-x[0]), ell), sli * t, S);
    }
    return total;
}

// ---------------------------------------------------------------- restricted distributions

Rational b_L_z_direct(const ExponentTuple& e, const LinearFormModL& L, long z, const RatVec& x, const SignMatrix& S) {
    int n = L.n();
    long ell = L.ell();
    if (static_cast<int>(x.size()) != n || static_cast<int>(e.size()) != n) fail(Errc::ShapeError, "restricted distribution shapes");
    z = mod_l(z, ell);
    long inv_last = inv_mod_l(L.a()[n - 1], ell);
    Rational s = 0;
    std::vector<long> y(n, 0);
    RatVec pt(n);
    while (true) {
        long partial = 0;
        for (int j = 0; j + 1 < n; ++j) partial += L.a()[j] * y[j];
        y[n - 1] = mod_l((z - partial) % ell * inv_last, ell);
        for (int j = 0; j < n; ++j) pt[j] = (x[j] + y[j]) / ell;
        s += B_e_Q(e, pt, S);
        int i = n - 2;
        while (i >= 0 && ++y[i] == ell) y[i--] = 0;
        if (i < 0) break;
    }
    return B_e_Q(e, x, S) - pow_q(Rational(ell), 1 - n + weight(e)) * s;
}

Rational b1_L_z_cyclo(const LinearFormModL& L, long z, const RatVec& x, const SignMatrix& S) {
    int n = L.n();
    long ell = L.ell();
    int l = static_cast<int>(ell);
    IntVec fl(n);
    for (int j = 0; j < n; ++j) fl[j] = floor_of(x[j]);
    long c = mod_l(-z - L.eval(fl), ell);
    CycloElement one(l, Rational(1));
    Rational total = 0;
    for (int i = 0; i < S.rows(); ++i) {
        CycloElement prod = CycloElement::zeta_power(l, c);
        for (int j = 0; j < n; ++j) {
            CycloElement za = CycloElement::zeta_power(l, L.a()[j]);
            CycloElement beta = cyclo_inv(za - one);
            if (is_integer(x[j]) && S(i, j) > 0) beta = za * beta;
            prod = prod * beta;
        }
        total += trace_to_Q(prod);
    }
    return -total / S.rows();
}

B1Table::B1Table(const LinearFormModL& L, const SignMatrix& S) : L_(L) {
    int n = L.n();
    long ell = L.ell();
    int m = S.rows();
    if (S.cols() != n) fail(Errc::ShapeError, "sign matrix width differs from the linear form");
    den_ = Integer(m) * pow_z(Integer(ell), static_cast<unsigned long>(n));
    unsigned masks = 1u << n;
    num_.assign(static_cast<size_t>(masks) * ell, Integer(0));
    // l / (zeta^a - 1) = sum_k k zeta^{ak} in Z[C_l]
    std::vector<std::vector<__int128>> base(n, std::vector<__int128>(ell, 0));
    for (int j = 0; j < n; ++j)
        for (long k = 0; k < ell; ++k) base[j][mod_l(L.a()[j] * k, ell)] += k;
    const __int128 limit = static_cast<__int128>(1) << 120;
    for (unsigned mask = 0; mask < masks; ++mask) {
        std::vector<Integer> acc(ell, Integer(0));
        Integer acc_sum = 0;
        for (int i = 0; i < m; ++i) {
            std::vector<__int128> g(ell, 0);
            g[0] = 1;
            for (int j = 0; j < n; ++j) {
                std::vector<__int128> f = base[j];
                if ((mask >> j & 1u) && S(i, j) > 0) f[0] += ell; // zeta^a/(zeta^a-1) = 1 + 1/(zeta^a-1)
                std::vector<__int128> h(ell, 0);
                for (long p = 0; p < ell; ++p) {
                    if (g[p] == 0) continue;
                    for (long q = 0; q < ell; ++q) {
                        if (f[q] == 0) continue;
                        long r = p + q;
                        if (r >= ell) r -= ell;
                        h[r] += g[p] * f[q];
                        if (h[r] > limit || h[r] < -limit) fail(Errc::Unsupported, "group ring coefficients overflow");
                    }
                }
                g.swap(h);
            }
            for (long p = 0; p < ell; ++p) {
                Integer gp;
                __int128 v = g[p];
                bool neg = v < 0;
                unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
                mpz_import(gp.get_mpz_t(), 2, -1, sizeof(uint64_t), 0, 0,
                           std::array<uint64_t, 2>{static_cast<uint64_t>(u), static_cast<uint64_t>(u >> 64)}.data());
                if (neg) gp = -gp;
                acc[p] += gp;
                acc_sum += gp;
            }
        }
        // -sum_i Tr(zeta^c G_i) = -(l G[-c] - sum G)
        for (long c = 0; c < ell; ++c) num_[mask * ell + c] = -(Integer(ell) * acc[mod_l(-c, ell)] - acc_sum);
    }
    num64_.resize(num_.size());
    for (size_t k = 0; k < num_.size(); ++k) {
        if (!num_[k].fits_slong_p()) {
            fits64_ = false;
            break;
        }
        num64_[k] = num_[k].get_si();
    }
}

Rational B1Table::value(long z, const RatVec& x) const {
    int n = L_.n();
    long ell = L_.ell();
    unsigned mask = 0;
    IntVec fl(n);
    for (int j = 0; j < n; ++j) {
        fl[j] = floor_of(x[j]);
        if (is_integer(x[j])) mask |= 1u << j;
    }
    long c = mod_l(-z - L_.eval(fl), ell);
    return ratio(numerator(mask, c), den_);
}

Rational b1_L_z_fast(const LinearFormModL& L, long z, const RatVec& x, const SignMatrix& S) {
    return B1Table(L, S).value(z, x);
}

Rational d_ell_one_fast(const IntegerMatrix& sigma, const SignMatrix& S, const RatVec& v, long ell) {
    int n = sigma.rows();
    ExponentTuple one(n, 1);
    check_shapes(sigma, one, S, v);
    if (n < 2) fail(Errc::ShapeError, "smoothed Dedekind sums need n >= 2");
    IntegerMatrix sl = sigma_ell(sigma, ell);
    Integer dl = det(sl);
    if (dl == 0) return 0;
    std::vector<long> a(n);
    for (int j = 0; j < n; ++j) {
        a[j] = mod_l(sigma(0, j), ell);
        if (a[j] == 0) return d_ell_signs(sigma, one, S, v, ell);
    }
    B1Table table(LinearFormModL(ell, a), S);
    RatVec pv = pi_ell(v, ell);
    Integer den = common_denominator(pv);
    IntVec w(n);
    for (int i = 0; i < n; ++i) w[i] = Rational(pv[i] * den).get_num();
    Integer D = dl * den;
    Integer acc = 0;
    IntVec fl(n);
    for_each_coset_image(sl, den, w, [&](const IntVec& Y, const IntVec& x) {
        unsigned mask = 0;
        for (int j = 0; j < n; ++j) {
            fl[j] = floor_div(Y[j], D);
            if (fl[j] * D == Y[j]) mask |= 1u << j;
        }
        long c = mod_l(x[0] - table.form().eval(fl), ell);
        acc += table.numerator(mask, c);
    });
    return ratio(acc, table.denominator());
}

// ---------------------------------------------------------------- cyclotomic Dedekind sum

CycloElement b1_exp(const Rational& x, long r, long ell) {
    int l = static_cast<int>(ell);
    if (mod_l(r, ell) == 0) fail(Errc::InvalidLinearForm, "r must be nonzero mod l");
    CycloElement one(l, Rational(1));
    long fx = mod_l(floor_of(x), ell);
    CycloElement out = CycloElement::zeta_power(l, -r * fx) * cyclo_inv(CycloElement::zeta_power(l, r) - one);
    if (is_integer(x)) out += CycloElement::zeta_power(l, -r * fx) * Rational(1, 2);
    return out;
}

CycloElement b1_exp_sum(const Rational& x, long r, long ell) {
    int l = static_cast<int>(ell);
    CycloElement out(l, Rational(0));
    for (long m = 1; m <= ell; ++m) out += CycloElement::zeta_power(l, r * m) * periodic_B(1, (x + m) / ell);
    return out;
}

// ---------------------------------------------------------------- cache

std::string DedekindCache::key(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v,
                               long ell, bool plus) {
    std::ostringstream os;
    os << ell << (plus ? "+" : "") << ";";
    for (const auto& x : sigma.data()) os << x.get_str() << ",";
    os << ";";
    for (int x : e) os << x << ",";
    os << ";" << S.digest() << ";";
    for (const auto& x : v) os << to_string(frac(x)) << ",";
    return os.str();
}

std::optional<Rational> DedekindCache::get(const std::string& k) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

void DedekindCache::put(const std::string& k, const Rational& value) {
    std::unique_lock lock(mu_);
    map_.emplace(k, value);
}

size_t DedekindCache::size() const {
    std::shared_lock lock(mu_);
    return map_.size();
}

void DedekindCache::clear() {
    std::unique_lock lock(mu_);
    map_.clear();
}

void DedekindCache::save(const std::string& path) const {
    std::shared_lock lock(mu_);
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) fail(Errc::Config, "cannot write cache file " + path);
        out << kHeader << "\n";
        std::vector<std::pair<std::string, Rational>> items(map_.begin(), map_.end());
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [k, v] : items) out << k << "\t" << to_string(v) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) fail(Errc::Config, "cannot move cache file into place");
}

void DedekindCache::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return; // a missing cache is an empty cache
    std::string line;
    if (!std::getline(in, line) || line != kHeader) fail(Errc::Config, "cache file " + path + " has an unknown format");
    std::unique_lock lock(mu_);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) fail(Errc::Config, "malformed cache line in " + path);
        map_[line.substr(0, tab)] = parse_rational(line.substr(tab + 1));
    }
}

} // namespace eis
