#include "eisenstein/bernoulli.hpp"

#include "eisenstein/error.hpp"

#include <deque>
#include <mutex>

namespace eis {

int weight(const ExponentTuple& e) {
    int s = 0;
    for (int x : e) s += x;
    return s;
}

SignMatrix::SignMatrix(int m, int n, std::vector<int8_t> s) : m_(m), n_(n), s_(std::move(s)) {
    if (static_cast<int>(s_.size()) != m * n) fail(Errc::ShapeError, "sign matrix size");
    for (auto x : s_)
        if (x != 1 && x != -1) fail(Errc::ShapeError, "sign matrix entries must be +-1");
}

SignMatrix SignMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    int m = static_cast<int>(rows.size());
    int n = m ? static_cast<int>(rows[0].size()) : 0;
    std::vector<int8_t> s;
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != n) fail(Errc::ShapeError, "ragged sign matrix");
        for (int x : r) s.push_back(static_cast<int8_t>(x));
    }
    return SignMatrix(m, n, s);
}

SignMatrix SignMatrix::negated() const {
    SignMatrix r = *this;
    for (auto& x : r.s_) x = static_cast<int8_t>(-x);
    return r;
}

std::string SignMatrix::digest() const {
    std::string d;
    d.reserve(s_.size() + 4);
    for (int i = 0; i < m_; ++i) {
        if (i) d += '|';
        for (int j = 0; j < n_; ++j) d += (*this)(i, j) > 0 ? '+' : '-';
    }
    return d;
}

namespace {

std::mutex g_bern_mutex;
std::deque<RatVec> g_bern; // stable references under push_back

} // namespace

const RatVec& bernoulli_coeffs(int k) {
    if (k < 0) fail(Errc::DegreeError, "negative Bernoulli index");
    std::lock_guard<std::mutex> lock(g_bern_mutex);
    if (g_bern.empty()) g_bern.push_back(RatVec{Rational(1)});
    while (static_cast<int>(g_bern.size()) <= k) {
        // b_m = m * integral of b_{m-1}, constant fixed by int_0^1 b_m = 0
        const RatVec& prev = g_bern.back();
        int m = static_cast<int>(g_bern.size());
        RatVec cur(m + 1, Rational(0));
        Rational mean = 0;
        for (int i = 0; i < m; ++i) {
            cur[i + 1] = prev[i] * m / (i + 1);
            mean += cur[i + 1] / (i + 2);
        }
        cur[0] = -mean;
        g_bern.push_back(std::move(cur));
    }
    return g_bern[k];
}

MultiPoly bernoulli_poly(int k) {
    const RatVec& c = bernoulli_coeffs(k);
    MultiPoly p(1);
    for (int i = 0; i <= k; ++i) p.add_term(Exponent{i}, c[i]);
    return p;
}

Rational bernoulli_number(int k) { return bernoulli_coeffs(k)[0]; }

Rational periodic_B(int k, const Rational& x) {
    if (k == 0) return 1;
    if (k == 1) {
        if (is_integer(x)) return 0;
        return frac(x) - Rational(1, 2);
    }
    const RatVec& c = bernoulli_coeffs(k);
    Rational fx = frac(x);
    Rational r = c[k];
    for (int i = k - 1; i >= 0; --i) r = r * fx + c[i];
    return r;
}

Rational B_e(const ExponentTuple& e, const RatVec& x) {
    if (e.size() != x.size()) fail(Errc::ShapeError, "B_e: |e| != |x|");
    Rational r = 1;
    for (size_t j = 0; j < e.size(); ++j) {
        r *= periodic_B(e[j], x[j]);
        if (r == 0) return r;
    }
    return r;
}

Rational B_e_Q(const ExponentTuple& e, const RatVec& v, const SignMatrix& s) {
    size_t n = e.size();
    if (v.size() != n || static_cast<size_t>(s.cols()) != n) fail(Errc::ShapeError, "B_e_Q shapes");
    Rational rest = 1;
    std::vector<int> J;
    for (size_t j = 0; j < n; ++j) {
        if (e[j] == 1 && is_integer(v[j])) {
            J.push_back(static_cast<int>(j));
        } else {
            rest *= periodic_B(e[j], v[j]);
            if (rest == 0) return 0;
        }
    }
    if (J.empty()) return rest;
    // sum over rows of prod_{j in J} sign/2
    long total = 0;
    for (int i = 0; i < s.rows(); ++i) {
        int sg = 1;
        for (int j : J) sg *= s(i, j);
        total += sg;
    }
    Rational r = rest * total;
    r /= Rational(s.rows()) * pow_z(Integer(2), J.size());
    return r;
}

Rational B_e_Q_plus(const ExponentTuple& e, const RatVec& v, const SignMatrix& s) {
    return (B_e_Q(e, v, s) + B_e_Q(e, v, s.negated())) / 2;
}

} // namespace eis
