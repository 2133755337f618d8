#include "eisenstein/cocycle.hpp"

#include "eisenstein/error.hpp"

#include <cstdlib>

namespace eis {

namespace {

bool ell_integral(const Rational& q, long ell) {
    return !mpz_divisible_ui_p(q.get_den_mpz_t(), static_cast<unsigned long>(ell));
}

Integer common_den(const RatVec& v) {
    Integer d = 1;
    for (const auto& x : v) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
    return d;
}

IntVec primitive(const RatVec& c) {
    Integer d = common_den(c);
    IntVec out(c.size());
    Integer g = 0;
    for (size_t i = 0; i < c.size(); ++i) {
        out[i] = Rational(c[i] * d).get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_mpz_t());
    }
    if (g != 0)
        for (auto& x : out) x /= g;
    return out;
}

long mod_l(const Integer& x, long ell) { return mod_pos(x, Integer(ell)).get_si(); }

__int128 floor_div128(__int128 a, __int128 b) {
    __int128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

__int128 to128(const Integer& z) {
    return static_cast<__int128>(z.get_si());
}

} // namespace

// ---------------------------------------------------------------- Gamma_l

bool is_in_gamma_ell(const RatMatrix& m, long ell) {
    if (!m.square() || m.rows() < 1) return false;
    for (const auto& x : m.data())
        if (!ell_integral(x, ell)) return false;
    Rational d = det(m);
    if (d == 0) return false;
    if (mpz_divisible_ui_p(d.get_num_mpz_t(), static_cast<unsigned long>(ell))) return false;
    for (int i = 1; i < m.rows(); ++i)
        if (!mpz_divisible_ui_p(m(i, 0).get_num_mpz_t(), static_cast<unsigned long>(ell))) return false;
    return true;
}

GammaEllMatrix::GammaEllMatrix(RatMatrix m, long ell) : m_(std::move(m)), ell_(ell) {
    if (!is_prime(ell)) fail(Errc::ShapeError, "l must be prime");
    if (!is_in_gamma_ell(m_, ell_)) fail(Errc::ChainDegenerate, "matrix is not in Gamma_" + std::to_string(ell) + ": " + to_string(m_));
}

GammaEllMatrix GammaEllMatrix::inverse() const { return GammaEllMatrix(eis::inverse(m_), ell_); }

GammaEllMatrix operator*(const GammaEllMatrix& a, const GammaEllMatrix& b) {
    if (a.ell_ != b.ell_) fail(Errc::ShapeError, "Gamma_l product with different l");
    return GammaEllMatrix(a.m_ * b.m_, a.ell_);
}

// ---------------------------------------------------------------- chains

void CocycleChain::add(const Integer& c, CocycleTuple t) {
    if (t.empty()) fail(Errc::ShapeError, "empty tuple");
    if (!terms_.empty()) {
        const auto& ref = terms_.front().tuple;
        if (t.size() != ref.size() || t[0].ell() != ref[0].ell())
            fail(Errc::ShapeError, "chain tuples must share n and l");
    }
    for (const auto& g : t)
        if (g.n() != static_cast<int>(t.size()) || g.ell() != t[0].ell())
            fail(Errc::ShapeError, "tuple length must equal the matrix size");
    if (c == 0) return;
    terms_.push_back({c, std::move(t)});
}

CocycleChain CocycleChain::scaled(const Integer& c) const {
    CocycleChain out;
    if (c == 0) return out;
    for (const auto& t : terms_) out.terms_.push_back({t.coeff * c, t.tuple});
    return out;
}

CocycleChain CocycleChain::operator+(const CocycleChain& o) const {
    CocycleChain out = *this;
    for (const auto& t : o.terms_) out.add(t.coeff, t.tuple);
    return out;
}

// ---------------------------------------------------------------- Psi_l

std::map<Exponent, Rational> pr_coefficients(const MultiPoly& P, const RatMatrix& sigma) {
    if (!P.is_zero() && !P.is_homogeneous()) fail(Errc::NotHomogeneous, "P_r(sigma) needs a homogeneous P");
    std::map<Exponent, Rational> out;
    MultiPoly composed = P.compose_linear(sigma);
    for (const auto& [r, c] : composed.terms()) {
        Integer f = 1;
        for (int x : r) f *= factorial(static_cast<unsigned long>(x));
        out[r] = c * f;
    }
    return out;
}

IntegerMatrix sigma_of_tuple(const CocycleTuple& A) {
    int n = static_cast<int>(A.size());
    IntegerMatrix s(n, n);
    for (int i = 0; i < n; ++i) {
        if (A[i].n() != n) fail(Errc::ShapeError, "tuple length must equal the matrix size");
        s.set_col(i, primitive(A[i].first_column()));
    }
    return s;
}

Rational psi_ell_sigma(const RatMatrix& sigma_in, const CocycleArgs& args, long ell, const PsiOptions& opt) {
    int n = sigma_in.rows();
    if (!sigma_in.square() || n < 2) fail(Errc::ShapeError, "sigma must be square with n >= 2");
    if (args.Q.cols() != n || static_cast<int>(args.v.size()) != n || (!args.P.is_zero() && args.P.nvars() != n))
        fail(Errc::ShapeError, "cocycle argument shapes disagree");
    if (det(sigma_in) == 0) return 0;
    IntegerMatrix sigma(n, n);
    if (opt.normalize) {
        for (int j = 0; j < n; ++j) sigma.set_col(j, primitive(sigma_in.col(j)));
    } else {
        sigma = to_integer(sigma_in);
    }
    Integer d = det(sigma);
    SignMatrix S = sign_of_inverse_action(sigma, args.Q);
    ExponentTuple one(n, 1);
    Rational total = 0;
    for (const auto& [deg, Pd] : args.P.homogeneous_components()) {
        (void)deg;
        for (const auto& [r, c] : pr_coefficients(Pd, sigma)) {
            ExponentTuple e(n);
            Integer fac = 1;
            int w = 0;
            for (int j = 0; j < n; ++j) {
                e[j] = 1 + r[j];
                fac *= factorial(static_cast<unsigned long>(e[j]));
                w += r[j];
            }
            Rational dl;
            std::string key;
            bool hit = false;
            if (opt.cache) {
                key = DedekindCache::key(sigma, e, S, args.v, ell, opt.plus);
                if (auto got = opt.cache->get(key)) {
                    dl = *got;
                    hit = true;
                }
            }
            if (!hit) {
                if (e == one && !opt.plus)
                    dl = d_ell_one_fast(sigma, S, args.v, ell);
                else if (e == one)
                    dl = (d_ell_one_fast(sigma, S, args.v, ell) + d_ell_one_fast(sigma, S.negated(), args.v, ell)) / 2;
                else
                    dl = d_ell_signs(sigma, e, S, args.v, ell, opt.plus);
                if (opt.cache) opt.cache->put(key, dl);
            }
            total += c / (Rational(fac) * pow_q(Rational(ell), w)) * dl;
        }
    }
    if ((n % 2 == 1) != (sgn(d) < 0)) return -total;
    return total;
}

Rational psi_ell(const CocycleTuple& A, const CocycleArgs& args, long ell, const PsiOptions& opt) {
    int n = static_cast<int>(A.size());
    RatMatrix s(n, n);
    for (int i = 0; i < n; ++i) {
        if (A[i].n() != n) fail(Errc::ShapeError, "tuple length must equal the matrix size");
        if (A[i].ell() != ell) fail(Errc::ShapeError, "tuple member lies in a different Gamma_l");
        s.set_col(i, A[i].first_column());
    }
    return psi_ell_sigma(s, args, ell, opt);
}

Rational psi_ell_plus(const CocycleTuple& A, const CocycleArgs& args, long ell, PsiOptions opt) {
    opt.plus = true;
    return psi_ell(A, args, ell, opt);
}

Rational psi_ell_chain(const CocycleChain& c, const CocycleArgs& args, long ell, const PsiOptions& opt) {
    Rational total = 0;
    for (const auto& t : c.terms()) total += Rational(t.coeff) * psi_ell(t.tuple, args, ell, opt);
    return total;
}

Rational module_action(const IntegerMatrix& gamma, const Evaluator& f, const CocycleArgs& args) {
    Integer d = det(gamma);
    if (d == 0) fail(Errc::SingularMatrix, "module action by a singular matrix");
    RatMatrix gi = inverse(to_rat(gamma));
    CocycleArgs moved;
    moved.P = args.P.is_zero() ? args.P : args.P.compose_linear(gamma);
    moved.Q = args.Q.act(gi);
    int n = gamma.rows();
    Rational total = 0;
    for (const auto& r : coset_reps(gamma)) {
        RatVec t(n);
        for (int i = 0; i < n; ++i) t[i] = Rational(r[i]) + args.v[i];
        moved.v = gi * t;
        total += f(moved);
    }
    return sgn(d) < 0 ? Rational(-total) : total;
}

CocycleTuple act_left(const GammaEllMatrix& g, const CocycleTuple& A) {
    CocycleTuple out;
    out.reserve(A.size());
    for (const auto& a : A) out.push_back(g * a);
    return out;
}

// ---------------------------------------------------------------- measure kernel

ChainMeasure::ChainMeasure(const CocycleChain& c, const FormsMatrix& Q, long ell) : ell_(ell) {
    if (c.empty()) fail(Errc::ChainDegenerate, "empty chain");
    n_ = static_cast<int>(c.terms().front().tuple.size());
    if (Q.cols() != n_) fail(Errc::ShapeError, "forms matrix width differs from n");
    den_ = Integer(Q.rows()) * pow_z(Integer(ell), static_cast<unsigned long>(n_));
    for (const auto& t : c.terms()) {
        if (t.tuple[0].ell() != ell) fail(Errc::ShapeError, "chain lies in a different Gamma_l");
        IntegerMatrix sigma = sigma_of_tuple(t.tuple);
        Integer d = det(sigma);
        if (d == 0) continue;
        Kernel k;
        k.coeff = ((n_ % 2 == 1) != (sgn(d) < 0)) ? Integer(-t.coeff) : t.coeff;
        k.sl = sigma_ell(sigma, ell);
        k.adj = adjugate(k.sl);
        k.det = det(k.sl);
        IntegerMatrix h = hnf(k.sl).H;
        Integer cosets = 1;
        for (int i = 0; i < n_; ++i) {
            cosets *= h(i, i);
            if (!h(i, i).fits_slong_p()) fail(Errc::Unsupported, "sigma_l too large");
            k.diag.push_back(h(i, i).get_si());
        }
        if (cosets > Integer(1) << 40) fail(Errc::Unsupported, "sigma_l has too many cosets");
        std::vector<long> a(n_);
        for (int j = 0; j < n_; ++j) {
            a[j] = mod_l(sigma(0, j), ell);
            if (a[j] == 0) fail(Errc::InvalidLinearForm, "first row of sigma has an entry divisible by l");
        }
        SignMatrix S = sign_of_inverse_action(sigma, Q);
        k.table = std::make_shared<B1Table>(LinearFormModL(ell, a), S);
        k.fast = k.table->fits64() && k.coeff.fits_slong_p() && abs(k.coeff) < Integer(1) << 20 &&
                 abs(k.det) < Integer(1) << 40;
        if (k.fast) {
            k.coeff64 = k.coeff.get_si();
            k.det128 = to128(k.det);
            for (const auto& x : k.adj.data()) {
                if (abs(x) >= Integer(1) << 40) {
                    k.fast = false;
                    break;
                }
                k.adj128.push_back(to128(x));
                k.adj_max = std::max<long long>(k.adj_max, std::llabs(x.get_si()));
            }
        }
        kernels_.push_back(std::move(k));
    }
}

Integer ChainMeasure::numerator(const IntVec& N, const Integer& D) const {
    if (static_cast<int>(N.size()) != n_ || D <= 0) fail(Errc::ShapeError, "bad measure argument");
    Integer total = 0;
    IntVec w = N;
    w[0] *= ell_;
    IntVec fl(n_);
    for (const auto& k : kernels_) {
        Integer Dd = k.det * D;
        IntVec Y = k.adj * w;
        IntVec x(n_, 0);
        Integer acc = 0;
        const LinearFormModL& L = k.table->form();
        while (true) {
            unsigned mask = 0;
            for (int j = 0; j < n_; ++j) {
                fl[j] = floor_div(Y[j], Dd);
                if (fl[j] * Dd == Y[j]) mask |= 1u << j;
            }
            long c = mod_l(x[0] - L.eval(fl), ell_);
            acc += k.table->numerator(mask, c);
            int i = n_ - 1;
            while (i >= 0) {
                x[i] += 1;
                for (int r = 0; r < n_; ++r) Y[r] += D * k.adj(r, i);
                if (x[i] < k.diag[i]) break;
                for (int r = 0; r < n_; ++r) Y[r] -= D * k.adj(r, i) * k.diag[i];
                x[i] = 0;
                --i;
            }
            if (i < 0) break;
        }
        total += k.coeff * acc;
    }
    return total;
}

bool ChainMeasure::numerator_fast(const __int128* N, __int128 D, __int128& out) const {
    const __int128 lim = static_cast<__int128>(1) << 62;
    if (D <= 0 || D > lim) return false;
    __int128 w[8];
    if (n_ > 8) return false;
    __int128 wmax = 0;
    for (int i = 0; i < n_; ++i) {
        w[i] = i == 0 ? N[0] * ell_ : N[i];
        if (N[i] > lim || N[i] < -lim) return false;
        wmax = std::max(wmax, w[i] < 0 ? -w[i] : w[i]);
    }
    out = 0;
    __int128 Y[8], fl[8];
    long x[8];
    for (const auto& k : kernels_) {
        if (!k.fast) return false;
        long dmax = 0;
        for (long d : k.diag) dmax = std::max(dmax, d);
        // |Y| <= n adj_max (wmax + D dmax)
        __int128 bound = static_cast<__int128>(n_) * k.adj_max * (wmax + D * dmax);
        if (bound > (static_cast<__int128>(1) << 100) || k.det128 * D > (static_cast<__int128>(1) << 100)) return false;
        const __int128 Dd = k.det128 * D;
        for (int r = 0; r < n_; ++r) {
            Y[r] = 0;
            for (int j = 0; j < n_; ++j) Y[r] += k.adj128[r * n_ + j] * w[j];
        }
        for (int i = 0; i < n_; ++i) x[i] = 0;
        const auto& a = k.table->form().a();
        __int128 acc = 0;
        while (true) {
            unsigned mask = 0;
            long Lv = 0;
            for (int j = 0; j < n_; ++j) {
                fl[j] = floor_div128(Y[j], Dd);
                if (fl[j] * Dd == Y[j]) mask |= 1u << j;
                long fm = static_cast<long>(fl[j] % ell_);
                Lv += a[j] * fm;
            }
            long c = (x[0] - Lv) % ell_;
            if (c < 0) c += ell_;
            acc += k.table->numerator64(mask, c);
            int i = n_ - 1;
            while (i >= 0) {
                x[i] += 1;
                for (int r = 0; r < n_; ++r) Y[r] += D * k.adj128[r * n_ + i];
                if (x[i] < k.diag[i]) break;
                for (int r = 0; r < n_; ++r) Y[r] -= D * k.adj128[r * n_ + i] * k.diag[i];
                x[i] = 0;
                --i;
            }
            if (i < 0) break;
        }
        out += static_cast<__int128>(k.coeff64) * acc;
    }
    return true;
}

Rational ChainMeasure::value(const RatVec& v) const {
    if (static_cast<int>(v.size()) != n_) fail(Errc::ShapeError, "measure point has the wrong length");
    Integer D = common_den(v);
    IntVec N(n_);
    for (int i = 0; i < n_; ++i) N[i] = Rational(v[i] * D).get_num();
    return ratio(numerator(N, D), den_);
}

} // namespace eis
