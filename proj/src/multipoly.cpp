#include "eisenstein/multipoly.hpp"

#include "eisenstein/error.hpp"

#include <sstream>

namespace eis {

MultiPoly MultiPoly::constant(int nvars, const Rational& c) {
    MultiPoly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(int nvars, int i) {
    Exponent e(nvars, 0);
    e.at(i) = 1;
    return monomial(e, 1);
}

MultiPoly MultiPoly::monomial(const Exponent& e, const Rational& c) {
    MultiPoly p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
}

Rational MultiPoly::coeff(const Exponent& e) const {
    auto it = t_.find(e);
    return it == t_.end() ? Rational(0) : it->second;
}

void MultiPoly::add_term(const Exponent& e, const Rational& c) {
    if (static_cast<int>(e.size()) != n_) fail(Errc::ShapeError, "exponent length mismatch");
    if (c == 0) return;
    auto [it, fresh] = t_.try_emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) t_.erase(it);
    }
}

int MultiPoly::degree() const {
    int d = -1;
    for (const auto& [e, c] : t_) {
        int s = 0;
        for (int x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

bool MultiPoly::is_homogeneous() const {
    int d = -1;
    for (const auto& [e, c] : t_) {
        int s = 0;
        for (int x : e) s += x;
        if (d >= 0 && s != d) return false;
        d = s;
    }
    return true;
}

std::map<int, MultiPoly> MultiPoly::homogeneous_components() const {
    std::map<int, MultiPoly> out;
    for (const auto& [e, c] : t_) {
        int s = 0;
        for (int x : e) s += x;
        auto it = out.try_emplace(s, MultiPoly(n_)).first;
        it->second.add_term(e, c);
    }
    return out;
}

Rational MultiPoly::evaluate(const RatVec& x) const {
    if (static_cast<int>(x.size()) != n_) fail(Errc::ShapeError, "evaluation point length");
    Rational s = 0;
    for (const auto& [e, c] : t_) {
        Rational term = c;
        for (int i = 0; i < n_; ++i)
            if (e[i]) term *= pow_q(x[i], e[i]);
        s += term;
    }
    return s;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    if (a.n_ != b.n_) fail(Errc::ShapeError, "variable count mismatch");
    MultiPoly r(a.n_);
    Exponent e(a.n_);
    for (const auto& [ea, ca] : a.t_)
        for (const auto& [eb, cb] : b.t_) {
            for (int i = 0; i < a.n_; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    return r;
}

MultiPoly MultiPoly::pow(unsigned k) const {
    MultiPoly result = constant(n_, 1), base = *this;
    while (k) {
        if (k & 1u) result = result * base;
        k >>= 1u;
        if (k) base = base * base;
    }
    return result;
}

MultiPoly MultiPoly::compose_linear(const RatMatrix& t) const {
    if (t.rows() != n_ || t.cols() != n_) fail(Errc::ShapeError, "linear substitution shape");
    std::vector<MultiPoly> y(n_, MultiPoly(n_));
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i)
            if (t(j, i) != 0) y[j].add_term([&] { Exponent e(n_, 0); e[i] = 1; return e; }(), t(j, i));
    // powers of each substituted variable, cached by exponent
    std::vector<std::vector<MultiPoly>> pw(n_);
    MultiPoly out(n_);
    for (const auto& [e, c] : t_) {
        MultiPoly term = constant(n_, c);
        for (int j = 0; j < n_; ++j) {
            if (!e[j]) continue;
            auto& cache = pw[j];
            if (cache.empty()) cache.push_back(constant(n_, 1));
            while (static_cast<int>(cache.size()) <= e[j]) cache.push_back(cache.back() * y[j]);
            term = term * cache[e[j]];
        }
        out += term;
    }
    return out;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r = *this;
    for (auto& [e, c] : r.t_) c = -c;
    return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    if (n_ != o.n_ && !o.t_.empty()) {
        if (t_.empty() && n_ == 0) n_ = o.n_;
        else fail(Errc::ShapeError, "variable count mismatch");
    }
    for (const auto& [e, c] : o.t_) add_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) { return *this += -o; }

MultiPoly& MultiPoly::operator*=(const Rational& c) {
    if (c == 0) {
        t_.clear();
        return *this;
    }
    for (auto& [e, x] : t_) x *= c;
    return *this;
}

std::string MultiPoly::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
        const auto& [e, c] = *it;
        if (!first) os << (sgn(c) < 0 ? " - " : " + ");
        else if (sgn(c) < 0) os << "-";
        first = false;
        Rational a = abs(c);
        bool unit = true;
        for (int x : e) unit = unit && x == 0;
        if (a != 1 || unit) os << to_string(a);
        bool star = (a != 1);
        for (int i = 0; i < n_; ++i) {
            if (!e[i]) continue;
            os << (star ? "*" : "") << "X" << (i + 1);
            if (e[i] > 1) os << "^" << e[i];
            star = true;
        }
    }
    return os.str();
}

namespace {

// Division-free determinant by expansion over column subsets: dp[S] is the
// signed sum over injective assignments of the first |S| rows to S.
MultiPoly poly_det(const std::vector<std::vector<MultiPoly>>& m, int nvars) {
    int n = static_cast<int>(m.size());
    std::vector<MultiPoly> dp(1u << n, MultiPoly(nvars));
    dp[0] = MultiPoly::constant(nvars, 1);
    for (unsigned s = 0; s < (1u << n); ++s) {
        if (dp[s].is_zero()) continue;
        int row = __builtin_popcount(s);
        if (row == n) continue;
        for (int c = 0; c < n; ++c) {
            if (s & (1u << c)) continue;
            if (m[row][c].is_zero()) continue;
            // sign: number of chosen columns greater than c
            int above = __builtin_popcount(s >> (c + 1));
            MultiPoly term = dp[s] * m[row][c];
            if (above & 1) dp[s | (1u << c)] -= term;
            else dp[s | (1u << c)] += term;
        }
    }
    return dp[(1u << n) - 1];
}

} // namespace

MultiPoly resultant_norm(const IntVec& f, const std::vector<MultiPoly>& g) {
    int n = static_cast<int>(f.size()) - 1;
    if (n < 1 || f.back() != 1) fail(Errc::DegreeError, "f must be monic of degree >= 1");
    if (static_cast<int>(g.size()) > n) fail(Errc::DegreeError, "deg_t g must be < deg f");
    int nv = 0;
    for (const auto& c : g) nv = std::max(nv, c.nvars());
    // columns: g * t^j reduced mod f, for j = 0..n-1
    // start with the coefficient vector of g, then multiply by t repeatedly
    std::vector<MultiPoly> cur(n, MultiPoly(nv));
    for (size_t k = 0; k < g.size(); ++k) cur[k] = g[k].is_zero() ? MultiPoly(nv) : g[k];
    std::vector<std::vector<MultiPoly>> m(n, std::vector<MultiPoly>(n, MultiPoly(nv)));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) m[i][j] = cur[i];
        // multiply by t: shift up, reduce t^n = -sum f_k t^k
        MultiPoly top = cur[n - 1];
        for (int i = n - 1; i > 0; --i) cur[i] = cur[i - 1];
        cur[0] = MultiPoly(nv);
        if (!top.is_zero())
            for (int i = 0; i < n; ++i)
                if (f[i] != 0) cur[i] -= top * Rational(f[i]);
    }
    return poly_det(m, nv);
}

std::vector<Exponent> compositions(int d, int n) {
    std::vector<Exponent> out;
    Exponent e(n, 0);
    auto rec = [&](auto&& self, int i, int left) -> void {
        if (i == n - 1) {
            e[i] = left;
            out.push_back(e);
            return;
        }
        for (int a = left; a >= 0; --a) {
            e[i] = a;
            self(self, i + 1, left - a);
        }
    };
    if (n == 0) return out;
    rec(rec, 0, d);
    return out;
}

} // namespace eis
