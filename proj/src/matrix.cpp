#include "eisenstein/matrix.hpp"

#include <sstream>
#include <utility>

namespace eis {

Integer det(const IntegerMatrix& m) {
    if (!m.square()) fail(Errc::ShapeError, "det of non-square matrix");
    int n = m.rows();
    if (n == 0) return 1;
    IntegerMatrix a = m;
    Integer prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (a(i, k) != 0) { p = i; break; }
            if (p < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                Integer t = a(k, k) * a(i, j) - a(i, k) * a(k, j);
                mpz_divexact(a(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

Rational det(const RatMatrix& m) {
    if (!m.square()) fail(Errc::ShapeError, "det of non-square matrix");
    int n = m.rows();
    RatMatrix a = m;
    Rational d = 1;
    for (int k = 0; k < n; ++k) {
        int p = -1;
        for (int i = k; i < n; ++i)
            if (a(i, k) != 0) { p = i; break; }
        if (p < 0) return 0;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            d = -d;
        }
        d *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            Rational f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

RatMatrix to_rat(const IntegerMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
    return r;
}

bool is_integral(const RatMatrix& m) {
    for (const auto& x : m.data())
        if (x.get_den() != 1) return false;
    return true;
}

IntegerMatrix to_integer(const RatMatrix& m) {
    IntegerMatrix r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (m(i, j).get_den() != 1) fail(Errc::ShapeError, "matrix not integral");
            r(i, j) = m(i, j).get_num();
        }
    return r;
}

RatMatrix inverse(const RatMatrix& m) {
    if (!m.square()) fail(Errc::ShapeError, "inverse of non-square matrix");
    int n = m.rows();
    RatMatrix a = m, inv = RatMatrix::identity(n);
    for (int k = 0; k < n; ++k) {
        int p = -1;
        for (int i = k; i < n; ++i)
            if (a(i, k) != 0) { p = i; break; }
        if (p < 0) fail(Errc::SingularMatrix, "matrix not invertible");
        if (p != k)
            for (int j = 0; j < n; ++j) {
                std::swap(a(k, j), a(p, j));
                std::swap(inv(k, j), inv(p, j));
            }
        Rational piv = a(k, k);
        for (int j = 0; j < n; ++j) {
            a(k, j) /= piv;
            inv(k, j) /= piv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k || a(i, k) == 0) continue;
            Rational f = a(i, k);
            for (int j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

IntegerMatrix adjugate(const IntegerMatrix& m) {
    int n = m.rows();
    IntegerMatrix adj(n, n);
    if (n == 1) {
        adj(0, 0) = 1;
        return adj;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            IntegerMatrix minor(n - 1, n - 1);
            for (int r = 0, rr = 0; r < n; ++r) {
                if (r == j) continue;
                for (int c = 0, cc = 0; c < n; ++c) {
                    if (c == i) continue;
                    minor(rr, cc++) = m(r, c);
                }
                ++rr;
            }
            Integer d = det(minor);
            adj(i, j) = ((i + j) % 2 == 0) ? d : Integer(-d);
        }
    return adj;
}

RatVec solve(const RatMatrix& m, const RatVec& b) { return inverse(m) * b; }

int rank(const RatMatrix& m) {
    RatMatrix a = m;
    int r = 0;
    for (int c = 0; c < a.cols() && r < a.rows(); ++c) {
        int p = -1;
        for (int i = r; i < a.rows(); ++i)
            if (a(i, c) != 0) { p = i; break; }
        if (p < 0) continue;
        for (int j = 0; j < a.cols(); ++j) std::swap(a(r, j), a(p, j));
        for (int i = r + 1; i < a.rows(); ++i) {
            if (a(i, c) == 0) continue;
            Rational f = a(i, c) / a(r, c);
            for (int j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
        }
        ++r;
    }
    return r;
}

namespace {

// Column operation on (H, U): [col p, col q] <- [col p, col q] * [[s, u], [t, v]].
void col_combine(IntegerMatrix& h, IntegerMatrix& u, int p, int q, const Integer& s, const Integer& t,
                 const Integer& uu, const Integer& v) {
    auto apply = [&](IntegerMatrix& a) {
        for (int i = 0; i < a.rows(); ++i) {
            Integer x = a(i, p), y = a(i, q);
            a(i, p) = s * x + t * y;
            a(i, q) = uu * x + v * y;
        }
    };
    apply(h);
    apply(u);
}

void col_negate(IntegerMatrix& a, int p) {
    for (int i = 0; i < a.rows(); ++i) a(i, p) = -a(i, p);
}

void col_axpy(IntegerMatrix& a, int dst, int src, const Integer& f) {
    for (int i = 0; i < a.rows(); ++i) a(i, dst) -= f * a(i, src);
}

} // namespace

HnfResult hnf(const IntegerMatrix& m) {
    IntegerMatrix h = m;
    IntegerMatrix u = IntegerMatrix::identity(m.cols());
    int piv = 0;
    for (int row = 0; row < h.rows() && piv < h.cols(); ++row) {
        for (int j = piv + 1; j < h.cols(); ++j) {
            if (h(row, j) == 0) continue;
            Integer a = h(row, piv), b = h(row, j);
            Integer g, s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
            Integer ag = a / g, bg = b / g;
            // new piv = s*piv + t*j ; new j = -bg*piv + ag*j ; determinant 1
            col_combine(h, u, piv, j, s, t, Integer(-bg), ag);
        }
        if (h(row, piv) == 0) continue;
        if (h(row, piv) < 0) {
            col_negate(h, piv);
            col_negate(u, piv);
        }
        for (int k = 0; k < piv; ++k) {
            Integer q = floor_div(h(row, k), h(row, piv));
            if (q != 0) {
                col_axpy(h, k, piv, q);
                col_axpy(u, k, piv, q);
            }
        }
        ++piv;
    }
    return {h, u};
}

CosetSystem::CosetSystem(const IntegerMatrix& m) {
    if (!m.square()) fail(Errc::ShapeError, "coset system needs a square matrix");
    Integer d = det(m);
    if (d == 0) fail(Errc::SingularMatrix, "coset representatives of a singular matrix");
    h_ = hnf(m).H;
    index_ = abs(d);
    int n = m.rows();
    IntVec x(n, 0);
    // odometer over the box prod [0, H_ii)
    while (true) {
        reps_.push_back(x);
        int i = n - 1;
        while (i >= 0) {
            x[i] += 1;
            if (x[i] < h_(i, i)) break;
            x[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
}

IntVec CosetSystem::reduce(IntVec x) const {
    int n = h_.rows();
    for (int i = 0; i < n; ++i) {
        Integer q = floor_div(x[i], h_(i, i));
        if (q == 0) continue;
        for (int r = i; r < n; ++r) x[r] -= q * h_(r, i);
    }
    return x;
}

std::vector<IntVec> coset_reps(const IntegerMatrix& m) { return CosetSystem(m).reps(); }

template <class T>
static std::string mat_str(const Matrix<T>& m) {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < m.rows(); ++i) {
        os << (i ? ",[" : "[");
        for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << to_string(m(i, j));
        os << "]";
    }
    os << "]";
    return os.str();
}

std::string to_string(const IntegerMatrix& m) { return mat_str(m); }
std::string to_string(const RatMatrix& m) { return mat_str(m); }

} // namespace eis
