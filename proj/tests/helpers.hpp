#pragma once

#include "eisenstein/matrix.hpp"
#include "eisenstein/rational.hpp"

#include <initializer_list>
#include <random>

namespace testutil {

inline eis::IntVec iv(std::initializer_list<long> xs) {
    eis::IntVec v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

inline eis::IntegerMatrix imat(std::initializer_list<std::initializer_list<long>> rows) {
    int r = static_cast<int>(rows.size());
    int c = static_cast<int>(rows.begin()->size());
    eis::IntegerMatrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (long x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

inline eis::Rational q(long a, long b = 1) { return eis::ratio(eis::Integer(a), eis::Integer(b)); }

inline eis::Rational rand_q(std::mt19937& g, long maxden = 12, long span = 3) {
    std::uniform_int_distribution<long> den(1, maxden);
    long d = den(g);
    std::uniform_int_distribution<long> num(-span * d, span * d);
    return q(num(g), d);
}

} // namespace testutil
