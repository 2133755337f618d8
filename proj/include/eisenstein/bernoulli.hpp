#pragma once

#include "eisenstein/multipoly.hpp"
#include "eisenstein/rational.hpp"

#include <cstdint>
#include <vector>

namespace eis {

using ExponentTuple = std::vector<int>;

int weight(const ExponentTuple& e); // sum of entries

// m x n matrix of signs +-1.
class SignMatrix {
public:
    SignMatrix() = default;
    SignMatrix(int m, int n, std::vector<int8_t> s);
    static SignMatrix from_rows(const std::vector<std::vector<int>>& rows);

    int rows() const { return m_; }
    int cols() const { return n_; }
    int operator()(int i, int j) const { return s_[static_cast<size_t>(i) * n_ + j]; }
    SignMatrix negated() const;
    std::string digest() const;
    friend bool operator==(const SignMatrix& a, const SignMatrix& b) { return a.m_ == b.m_ && a.n_ == b.n_ && a.s_ == b.s_; }

private:
    int m_ = 0, n_ = 0;
    std::vector<int8_t> s_;
};

// Coefficients of b_k, low to high. Memoized; safe for concurrent callers.
const RatVec& bernoulli_coeffs(int k);
MultiPoly bernoulli_poly(int k);
Rational bernoulli_number(int k);

Rational periodic_B(int k, const Rational& x);
Rational B_e(const ExponentTuple& e, const RatVec& x);
Rational B_e_Q(const ExponentTuple& e, const RatVec& v, const SignMatrix& s);
Rational B_e_Q_plus(const ExponentTuple& e, const RatVec& v, const SignMatrix& s);

} // namespace eis
