#include "eisenstein/cyclotomic.hpp"

#include "eisenstein/error.hpp"
#include "eisenstein/matrix.hpp"

#include <sstream>

namespace eis {

namespace {

void check_prime(int ell) {
    if (!is_prime(ell)) fail(Errc::MismatchedField, "cyclotomic level must be prime, got " + std::to_string(ell));
}

void same_field(const CycloElement& a, const CycloElement& b) {
    if (a.ell() != b.ell()) fail(Errc::MismatchedField, "elements of different cyclotomic fields");
}

// Reduce a length-l vector (coefficients of zeta^0..zeta^{l-1}) to the power basis.
RatVec reduce_full(RatVec full, int ell) {
    Rational top = full[ell - 1];
    full.pop_back();
    if (top != 0)
        for (auto& x : full) x -= top;
    return full;
}

long mod_l(long k, int ell) {
    long r = k % ell;
    return r < 0 ? r + ell : r;
}

} // namespace

CycloElement::CycloElement(int ell, const Rational& c) : ell_(ell), c_(ell - 1, Rational(0)) {
    check_prime(ell);
    c_[0] = c;
}

CycloElement::CycloElement(int ell, RatVec coords) : ell_(ell), c_(std::move(coords)) {
    check_prime(ell);
    if (static_cast<int>(c_.size()) == ell) c_ = reduce_full(c_, ell);
    if (static_cast<int>(c_.size()) != ell - 1) fail(Errc::ShapeError, "cyclotomic coordinate length");
}

CycloElement CycloElement::zeta_power(int ell, long k) {
    RatVec full(ell, Rational(0));
    full[mod_l(k, ell)] = 1;
    return CycloElement(ell, full);
}

bool CycloElement::is_zero() const {
    for (const auto& x : c_)
        if (x != 0) return false;
    return true;
}

CycloElement& CycloElement::operator+=(const CycloElement& o) {
    same_field(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

CycloElement& CycloElement::operator-=(const CycloElement& o) {
    same_field(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

CycloElement& CycloElement::operator*=(const Rational& s) {
    for (auto& x : c_) x *= s;
    return *this;
}

std::string CycloElement::str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << to_string(c_[i]);
    os << "]";
    return os.str();
}

CycloElement cyclo_mul(const CycloElement& a, const CycloElement& b) {
    same_field(a, b);
    int ell = a.ell();
    RatVec full(ell, Rational(0));
    for (int i = 0; i < ell - 1; ++i) {
        if (a.coords()[i] == 0) continue;
        for (int j = 0; j < ell - 1; ++j) {
            if (b.coords()[j] == 0) continue;
            full[(i + j) % ell] += a.coords()[i] * b.coords()[j];
        }
    }
    return CycloElement(ell, full);
}

CycloElement cyclo_inv(const CycloElement& a) {
    if (a.is_zero()) fail(Errc::DivisionByZero, "inverse of 0 in Q(zeta)");
    int ell = a.ell();
    int d = ell - 1;
    // matrix of multiplication by a: column j = a * zeta^j
    RatMatrix m(d, d);
    for (int j = 0; j < d; ++j) {
        CycloElement col = cyclo_mul(a, CycloElement::zeta_power(ell, j));
        for (int i = 0; i < d; ++i) m(i, j) = col.coords()[i];
    }
    RatVec e(d, Rational(0));
    e[0] = 1;
    return CycloElement(ell, solve(m, e));
}

Rational trace_to_Q(const CycloElement& a) {
    // Tr(1) = l-1, Tr(zeta^i) = -1 for 0 < i < l
    Rational t = a.coords()[0] * (a.ell() - 1);
    for (size_t i = 1; i < a.coords().size(); ++i) t -= a.coords()[i];
    return t;
}

CycloElement cyclo_conj(const CycloElement& a, long k) {
    int ell = a.ell();
    if (mod_l(k, ell) == 0) fail(Errc::MismatchedField, "conjugation exponent divisible by l");
    RatVec full(ell, Rational(0));
    for (int i = 0; i < ell - 1; ++i) full[mod_l(i * k, ell)] += a.coords()[i];
    return CycloElement(ell, full);
}

} // namespace eis
