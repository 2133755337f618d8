#pragma once

#include "eisenstein/matrix.hpp"
#include "eisenstein/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace eis {

using Exponent = std::vector<int>;

// Polynomial in n variables with rational coefficients. Zero coefficients
// are never stored; terms are ordered lexicographically by exponent.
class MultiPoly {
public:
    MultiPoly() = default;
    explicit MultiPoly(int nvars) : n_(nvars) {}

    static MultiPoly constant(int nvars, const Rational& c);
    static MultiPoly variable(int nvars, int i);
    static MultiPoly monomial(const Exponent& e, const Rational& c);

    int nvars() const { return n_; }
    const std::map<Exponent, Rational>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    Rational coeff(const Exponent& e) const;
    void add_term(const Exponent& e, const Rational& c);

    int degree() const; // -1 for the zero polynomial
    bool is_homogeneous() const;
    std::map<int, MultiPoly> homogeneous_components() const;

    Rational evaluate(const RatVec& x) const;
    MultiPoly pow(unsigned k) const;
    // P(T X): variable j replaced by sum_i T(j,i) X_i. With T = sigma this is
    // P(X sigma^t).
    MultiPoly compose_linear(const RatMatrix& t) const;
    MultiPoly compose_linear(const IntegerMatrix& t) const { return compose_linear(to_rat(t)); }

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(const Rational& c);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
    friend bool operator==(const MultiPoly& a, const MultiPoly& b) { return a.n_ == b.n_ && a.t_ == b.t_; }
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

    std::string str() const;

private:
    int n_ = 0;
    std::map<Exponent, Rational> t_;
};

// prod over the roots theta_i of the monic polynomial f (coefficients low to
// high) of g(theta_i; X), where g = sum_k g[k] t^k. Computed as the
// determinant of multiplication by g on Q(X)[t]/(f), which equals the
// resultant Res(f, g) for monic f.
MultiPoly resultant_norm(const IntVec& f, const std::vector<MultiPoly>& g);

// All exponent tuples of length n summing to d, in lexicographic order.
std::vector<Exponent> compositions(int d, int n);

} // namespace eis
