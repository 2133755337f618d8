#pragma once

#include "eisenstein/bernoulli.hpp"
#include "eisenstein/cyclotomic.hpp"
#include "eisenstein/matrix.hpp"
#include "eisenstein/numberfield.hpp"

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace eis {

// L in Hom(Z^n, F_l) given by its values a_j on the standard basis.
class LinearFormModL {
public:
    LinearFormModL(long ell, std::vector<long> a); // throws InvalidLinearForm if some a_j = 0 mod l
    long ell() const { return ell_; }
    int n() const { return static_cast<int>(a_.size()); }
    const std::vector<long>& a() const { return a_; }
    long eval(const IntVec& y) const; // in [0, l)

private:
    long ell_;
    std::vector<long> a_;
};

// m x n matrix of linear forms with exact signs. Entries are rationals or
// number field elements read at a fixed real embedding per row.
class FormsMatrix {
public:
    FormsMatrix() = default;
    static FormsMatrix rational(const RatMatrix& q);
    static FormsMatrix embedded(FieldPtr F, const std::vector<std::vector<FieldElement>>& rows,
                                const std::vector<int>& embeddings);

    int rows() const { return m_; }
    int cols() const { return n_; }
    bool is_rational() const { return F_ == nullptr; }
    int sign(int i, int j) const;
    SignMatrix signs() const;          // throws ZeroFormValue on a zero entry
    FormsMatrix act(const RatMatrix& M) const; // entries of Q M^t
    FormsMatrix negated() const;
    FormsMatrix scale_row(int i, const Rational& c) const;
    std::string entry_str(int i, int j) const;

private:
    int m_ = 0, n_ = 0;
    FieldPtr F_;
    std::vector<int> emb_;
    std::vector<Rational> rat_;
    std::vector<FieldElement> fe_;
};

// sign(sigma^{-1} Q): entry (i,j) is the sign of Q_i . (row j of sigma^{-1}).
SignMatrix sign_of_inverse_action(const IntegerMatrix& sigma, const FormsMatrix& Q);

// sigma_l: first row kept, rows 2..n divided by l. ShapeError if not integral.
IntegerMatrix sigma_ell(const IntegerMatrix& sigma, long ell);

// D(sigma, e, S, v) = sum over Z^n / sigma Z^n of B_e(sigma^{-1}(x+v), S), or
// of B_e^+ when plus is set. 0 if det sigma = 0.
Rational d_sum(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v, bool plus = false);
Rational d_plus(const IntegerMatrix& sigma, const ExponentTuple& e, const FormsMatrix& Q, const RatVec& v);

// D(sigma_l, e, S, pi_l v) - l^{1-n+|e|} D(sigma, e, S, v) with S = sign(sigma^{-1} Q).
Rational d_ell_signs(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v, long ell,
                     bool plus = false);
Rational d_ell(const IntegerMatrix& sigma, const ExponentTuple& e, const FormsMatrix& Q, const RatVec& v, long ell);
Rational d_ell_plus(const IntegerMatrix& sigma, const ExponentTuple& e, const FormsMatrix& Q, const RatVec& v, long ell);

// Right-hand side of the decomposition into restricted distributions, summed
// with b_L_z_direct. Oracle for d_ell_signs.
Rational d_ell_decomposed(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v,
                          long ell);

Rational b_L_z_direct(const ExponentTuple& e, const LinearFormModL& L, long z, const RatVec& x, const SignMatrix& S);
// Trace formula evaluated in Q(zeta_l) with CycloElement.
Rational b1_L_z_cyclo(const LinearFormModL& L, long z, const RatVec& x, const SignMatrix& S);
// Trace formula through a precomputed integer table.
Rational b1_L_z_fast(const LinearFormModL& L, long z, const RatVec& x, const SignMatrix& S);

// Values of b_1^{L,z}(x, S) for one (L, S): numerator T[mask][c] over
// m * l^n, where mask marks the integral coordinates of x and
// c = -z - L(floor x) mod l.
class B1Table {
public:
    B1Table(const LinearFormModL& L, const SignMatrix& S);
    long ell() const { return L_.ell(); }
    int n() const { return L_.n(); }
    const LinearFormModL& form() const { return L_; }
    const Integer& denominator() const { return den_; }
    const Integer& numerator(unsigned mask, long c) const { return num_[mask * L_.ell() + c]; }
    bool fits64() const { return fits64_; }
    int64_t numerator64(unsigned mask, long c) const { return num64_[mask * L_.ell() + c]; }
    Rational value(long z, const RatVec& x) const;

private:
    LinearFormModL L_;
    Integer den_;
    std::vector<Integer> num_;
    std::vector<int64_t> num64_;
    bool fits64_ = true;
};

// D_l(sigma, 1, S, v) through the decomposition and a B1Table. Falls back to
// d_ell_signs when the first row of sigma has an entry divisible by l.
Rational d_ell_one_fast(const IntegerMatrix& sigma, const SignMatrix& S, const RatVec& v, long ell);

// Cyclotomic Dedekind sum: closed form and the defining l-term sum.
CycloElement b1_exp(const Rational& x, long r, long ell);
CycloElement b1_exp_sum(const Rational& x, long r, long ell);

// Memo of D_l values. Concurrent readers, serialized writers.
class DedekindCache {
public:
    static std::string key(const IntegerMatrix& sigma, const ExponentTuple& e, const SignMatrix& S, const RatVec& v,
                           long ell, bool plus);
    std::optional<Rational> get(const std::string& k) const;
    void put(const std::string& k, const Rational& value);
    size_t size() const;
    void clear();
    // Line format: a version header, then "key<TAB>num/den" per entry.
    void save(const std::string& path) const;
    void load(const std::string& path); // Config error on a bad header or line
    static constexpr const char* kHeader = "eisenstein-dedekind-cache v1";

private:
    mutable std::shared_mutex mu_;
    std::unordered_map<std::string, Rational> map_;
};

} // namespace eis
