#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace eis {

using Integer = mpz_class;
using Rational = mpq_class;
using RatVec = std::vector<Rational>;
using IntVec = std::vector<Integer>;

// Canonical "num/den" form; integers print without a denominator.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);
Rational parse_rational(std::string_view s);
Integer parse_integer(std::string_view s);

inline int sgn(const Integer& z) { return mpz_sgn(z.get_mpz_t()); }
inline int sgn(const Rational& q) { return mpq_sgn(q.get_mpq_t()); }
inline bool is_integer(const Rational& q) { return q.get_den() == 1; }
// a/b in lowest terms (the two-argument mpq_class constructor does not reduce).
inline Rational ratio(const Integer& a, const Integer& b) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

Integer floor_of(const Rational& q);
Rational frac(const Rational& q); // q - floor(q), in [0,1)
Integer floor_div(const Integer& a, const Integer& b);
Integer mod_pos(const Integer& a, const Integer& m);

Rational pow_q(const Rational& q, long e);
Integer pow_z(const Integer& z, unsigned long e);
Integer factorial(unsigned long k);
Integer binomial(unsigned long n, unsigned long k);

// p-adic valuation; v(0) is reported as `cap`.
long valuation(const Integer& z, const Integer& p, long cap = 1L << 20);
long valuation(const Rational& q, const Integer& p, long cap = 1L << 20);

// Largest power of p dividing the denominator reduced away: true if the
// denominator of q only involves primes in `primes`.
bool denominator_supported_on(const Rational& q, const std::vector<long>& primes);

bool is_prime(long n);
std::vector<std::pair<Integer, int>> factor_small(Integer n, long trial_bound = 1000000);

RatVec to_rat(const IntVec& v);

} // namespace eis
