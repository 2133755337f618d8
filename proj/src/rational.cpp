#include "eisenstein/rational.hpp"

#include "eisenstein/error.hpp"

#include <cctype>

namespace eis {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::DegreeError: return "DegreeError";
    case Errc::MismatchedField: return "MismatchedField";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::ShapeError: return "ShapeError";
    case Errc::NotHomogeneous: return "NotHomogeneous";
    case Errc::InvalidLinearForm: return "InvalidLinearForm";
    case Errc::ZeroFormValue: return "ZeroFormValue";
    case Errc::NotTotallyReal: return "NotTotallyReal";
    case Errc::NotIrreducible: return "NotIrreducible";
    case Errc::NotMonic: return "NotMonic";
    case Errc::SingularGram: return "SingularGram";
    case Errc::ZeroIdeal: return "ZeroIdeal";
    case Errc::NoDegreeOnePrime: return "NoDegreeOnePrime";
    case Errc::IndexDivisor: return "IndexDivisor";
    case Errc::IndexNotPrime: return "IndexNotPrime";
    case Errc::UnitsRequired: return "UnitsRequired";
    case Errc::NotTotallyPositive: return "NotTotallyPositive";
    case Errc::NotCongruentOne: return "NotCongruentOne";
    case Errc::DependentUnits: return "DependentUnits";
    case Errc::NotFoundWithinBound: return "NotFoundWithinBound";
    case Errc::ChainDegenerate: return "ChainDegenerate";
    case Errc::CrossCheckFailure: return "CrossCheckFailure";
    case Errc::MissingClassData: return "MissingClassData";
    case Errc::LevelTooSmall: return "LevelTooSmall";
    case Errc::PrecisionExhausted: return "PrecisionExhausted";
    case Errc::ResidueFieldMismatch: return "ResidueFieldMismatch";
    case Errc::RefinementLimit: return "RefinementLimit";
    case Errc::NotPIntegral: return "NotPIntegral";
    case Errc::Unsupported: return "Unsupported";
    case Errc::Config: return "ConfigError";
    }
    return "Error";
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

static std::string trimmed(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

Integer parse_integer(std::string_view s) {
    std::string t = trimmed(s);
    size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i == t.size()) fail(Errc::Config, "bad integer '" + t + "'");
    for (size_t j = i; j < t.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(t[j]))) fail(Errc::Config, "bad integer '" + t + "'");
    if (t[0] == '+') t.erase(0, 1);
    return Integer(t, 10);
}

Rational parse_rational(std::string_view s) {
    std::string t = trimmed(s);
    auto slash = t.find('/');
    if (slash == std::string::npos) return Rational(parse_integer(t));
    Integer num = parse_integer(std::string_view(t).substr(0, slash));
    Integer den = parse_integer(std::string_view(t).substr(slash + 1));
    if (den == 0) fail(Errc::Config, "zero denominator in '" + t + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Integer floor_div(const Integer& a, const Integer& b) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Integer mod_pos(const Integer& a, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    if (r < 0) r += abs(m);
    return r;
}

Integer floor_of(const Rational& q) { return floor_div(q.get_num(), q.get_den()); }

Rational frac(const Rational& q) { return q - Rational(floor_of(q)); }

Rational pow_q(const Rational& q, long e) {
    if (e < 0) {
        if (q == 0) fail(Errc::DivisionByZero, "0 to negative power");
        Rational inv = 1 / q;
        return pow_q(inv, -e);
    }
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(r.get_den_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

Integer pow_z(const Integer& z, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), z.get_mpz_t(), e);
    return r;
}

Integer factorial(unsigned long k) {
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), k);
    return r;
}

Integer binomial(unsigned long n, unsigned long k) {
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

long valuation(const Integer& z, const Integer& p, long cap) {
    if (z == 0) return cap;
    Integer t = z;
    long v = 0;
    while (mpz_divisible_p(t.get_mpz_t(), p.get_mpz_t())) {
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
        ++v;
    }
    return v;
}

long valuation(const Rational& q, const Integer& p, long cap) {
    if (q == 0) return cap;
    return valuation(q.get_num(), p, cap) - valuation(q.get_den(), p, cap);
}

bool denominator_supported_on(const Rational& q, const std::vector<long>& primes) {
    Integer d = q.get_den();
    for (long p : primes) {
        Integer pp(p);
        while (mpz_divisible_p(d.get_mpz_t(), pp.get_mpz_t())) mpz_divexact(d.get_mpz_t(), d.get_mpz_t(), pp.get_mpz_t());
    }
    return d == 1;
}

bool is_prime(long n) {
    if (n < 2) return false;
    Integer z(n);
    return mpz_probab_prime_p(z.get_mpz_t(), 30) > 0;
}

std::vector<std::pair<Integer, int>> factor_small(Integer n, long trial_bound) {
    std::vector<std::pair<Integer, int>> out;
    if (n < 0) n = -n;
    if (n <= 1) return out;
    for (long p = 2; p <= trial_bound && Integer(p) * p <= n; ++p) {
        int e = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(p));
            ++e;
        }
        if (e) out.emplace_back(Integer(p), e);
    }
    if (n > 1) {
        // Remaining cofactor: prime, or a composite above the trial bound.
        if (mpz_probab_prime_p(n.get_mpz_t(), 30) > 0) {
            out.emplace_back(n, 1);
        } else {
            Integer r;
            if (mpz_perfect_square_p(n.get_mpz_t()) && (mpz_sqrt(r.get_mpz_t(), n.get_mpz_t()), mpz_probab_prime_p(r.get_mpz_t(), 30) > 0)) {
                out.emplace_back(r, 2);
            } else {
                fail(Errc::Unsupported, "cannot factor " + n.get_str() + " by trial division");
            }
        }
    }
    return out;
}

RatVec to_rat(const IntVec& v) {
    RatVec r;
    r.reserve(v.size());
    for (const auto& x : v) r.emplace_back(x);
    return r;
}

} // namespace eis
