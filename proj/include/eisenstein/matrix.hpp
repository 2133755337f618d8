#pragma once

#include "eisenstein/error.hpp"
#include "eisenstein/rational.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace eis {

// Dense row-major matrix. Small sizes only (n <= 8 in practice).
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols, T(0)) {}
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        r_ = static_cast<int>(rows.size());
        c_ = r_ ? static_cast<int>(rows.begin()->size()) : 0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != c_) fail(Errc::ShapeError, "ragged matrix literal");
            for (const auto& x : row) a_.push_back(x);
        }
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    bool square() const { return r_ == c_; }

    T& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const T& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

    std::vector<T> col(int j) const {
        std::vector<T> v(r_);
        for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    std::vector<T> row(int i) const {
        return std::vector<T>(a_.begin() + static_cast<long>(i) * c_, a_.begin() + static_cast<long>(i + 1) * c_);
    }
    void set_col(int j, const std::vector<T>& v) {
        for (int i = 0; i < r_; ++i) (*this)(i, j) = v[i];
    }

    Matrix transpose() const {
        Matrix t(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        if (x.c_ != y.r_) fail(Errc::ShapeError, "matrix product shape");
        Matrix z(x.r_, y.c_);
        for (int i = 0; i < x.r_; ++i)
            for (int k = 0; k < x.c_; ++k) {
                if (x(i, k) == 0) continue;
                for (int j = 0; j < y.c_; ++j) z(i, j) += x(i, k) * y(k, j);
            }
        return z;
    }
    friend std::vector<T> operator*(const Matrix& x, const std::vector<T>& v) {
        if (x.c_ != static_cast<int>(v.size())) fail(Errc::ShapeError, "matrix-vector shape");
        std::vector<T> out(x.r_, T(0));
        for (int i = 0; i < x.r_; ++i)
            for (int j = 0; j < x.c_; ++j) out[i] += x(i, j) * v[j];
        return out;
    }
    friend Matrix operator+(const Matrix& x, const Matrix& y) {
        Matrix z = x;
        for (size_t k = 0; k < z.a_.size(); ++k) z.a_[k] += y.a_[k];
        return z;
    }
    friend Matrix operator-(const Matrix& x, const Matrix& y) {
        Matrix z = x;
        for (size_t k = 0; k < z.a_.size(); ++k) z.a_[k] -= y.a_[k];
        return z;
    }
    Matrix scaled(const T& s) const {
        Matrix z = *this;
        for (auto& x : z.a_) x *= s;
        return z;
    }
    friend bool operator==(const Matrix& x, const Matrix& y) {
        return x.r_ == y.r_ && x.c_ == y.c_ && x.a_ == y.a_;
    }
    friend bool operator!=(const Matrix& x, const Matrix& y) { return !(x == y); }

    const std::vector<T>& data() const { return a_; }

private:
    int r_ = 0, c_ = 0;
    std::vector<T> a_;
};

using IntegerMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;

Integer det(const IntegerMatrix& m);   // fraction-free Bareiss
Rational det(const RatMatrix& m);
IntegerMatrix adjugate(const IntegerMatrix& m);
RatMatrix inverse(const RatMatrix& m); // throws SingularMatrix
RatMatrix to_rat(const IntegerMatrix& m);
bool is_integral(const RatMatrix& m);
IntegerMatrix to_integer(const RatMatrix& m); // throws ShapeError if not integral
RatVec solve(const RatMatrix& m, const RatVec& b);
int rank(const RatMatrix& m);

// Column-style Hermite normal form: H = M*U with U unimodular (column
// operations). H is lower triangular in echelon form: pivot of column j lies
// in a row strictly below that of column j-1, pivots are positive, entries to
// the left of a pivot are reduced into [0, pivot). Zero columns come last.
struct HnfResult {
    IntegerMatrix H;
    IntegerMatrix U;
};
HnfResult hnf(const IntegerMatrix& m);

// Canonical coset representatives of Z^n / M Z^n: vectors with
// 0 <= x_i < H_ii for the HNF H of M, enumerated in lexicographic order of
// (x_0, x_1, ...), and a reduction map sending any vector to its
// representative.
class CosetSystem {
public:
    explicit CosetSystem(const IntegerMatrix& m);
    const IntegerMatrix& hnf_basis() const { return h_; }
    const Integer& index() const { return index_; }
    const std::vector<IntVec>& reps() const { return reps_; }
    IntVec reduce(IntVec x) const;

private:
    IntegerMatrix h_;
    Integer index_;
    std::vector<IntVec> reps_;
};

std::vector<IntVec> coset_reps(const IntegerMatrix& m);

std::string to_string(const IntegerMatrix& m);
std::string to_string(const RatMatrix& m);

} // namespace eis
