#pragma once

#include "eisenstein/rational.hpp"

#include <string>

namespace eis {

// Element of Q(zeta_l), l prime, in the power basis 1, zeta, ..., zeta^{l-2}.
class CycloElement {
public:
    CycloElement() = default;
    CycloElement(int ell, const Rational& c);
    CycloElement(int ell, RatVec coords);

    static CycloElement zeta_power(int ell, long k); // zeta^k, any integer k

    int ell() const { return ell_; }
    const RatVec& coords() const { return c_; }
    bool is_zero() const;

    CycloElement& operator+=(const CycloElement& o);
    CycloElement& operator-=(const CycloElement& o);
    CycloElement& operator*=(const Rational& s);
    friend CycloElement operator+(CycloElement a, const CycloElement& b) { return a += b; }
    friend CycloElement operator-(CycloElement a, const CycloElement& b) { return a -= b; }
    friend CycloElement operator*(CycloElement a, const Rational& s) { return a *= s; }
    friend bool operator==(const CycloElement& a, const CycloElement& b) { return a.ell_ == b.ell_ && a.c_ == b.c_; }

    std::string str() const;

private:
    int ell_ = 0;
    RatVec c_;
};

CycloElement cyclo_mul(const CycloElement& a, const CycloElement& b);
CycloElement cyclo_inv(const CycloElement& a);
Rational trace_to_Q(const CycloElement& a);
// Galois conjugate zeta -> zeta^k, gcd(k, l) = 1.
CycloElement cyclo_conj(const CycloElement& a, long k);

inline CycloElement operator*(const CycloElement& a, const CycloElement& b) { return cyclo_mul(a, b); }

} // namespace eis
