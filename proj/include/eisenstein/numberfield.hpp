#pragma once

#include "eisenstein/matrix.hpp"
#include "eisenstein/multipoly.hpp"
#include "eisenstein/rational.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace eis {

// Coordinates in the power basis 1, theta, ..., theta^{n-1}.
struct FieldElement {
    RatVec c;
    bool is_zero() const;
    friend bool operator==(const FieldElement& a, const FieldElement& b) { return a.c == b.c; }
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return a.c != b.c; }
};

struct RootInterval {
    Rational lo, hi;
};

struct RatInterval {
    Rational lo, hi;
    bool contains_zero() const { return sgn(lo) <= 0 && sgn(hi) >= 0; }
};

class NumberField;
using FieldPtr = std::shared_ptr<const NumberField>;

// Element together with a real embedding index (0-based, ascending roots).
struct RealAlgebraic {
    FieldElement x;
    int embedding = 0;
};

class NumberField : public std::enable_shared_from_this<NumberField> {
public:
    // f: integer coefficients, low to high, monic, degree >= 2. When
    // trusted_irreducible is false, irreducibility must be certified.
    static FieldPtr create(const IntVec& f, bool trusted_irreducible = false);

    int degree() const { return n_; }
    const IntVec& poly() const { return f_; }
    std::string poly_str() const;
    const Integer& poly_discriminant() const { return disc_f_; }

    FieldElement zero() const;
    FieldElement one() const;
    FieldElement theta() const;
    FieldElement from_rational(const Rational& q) const;
    FieldElement from_coords(RatVec c) const;
    FieldElement from_ints(const std::vector<long>& c) const;

    FieldElement add(const FieldElement& a, const FieldElement& b) const;
    FieldElement sub(const FieldElement& a, const FieldElement& b) const;
    FieldElement neg(const FieldElement& a) const;
    FieldElement scale(const FieldElement& a, const Rational& s) const;
    FieldElement mul(const FieldElement& a, const FieldElement& b) const;
    FieldElement inv(const FieldElement& a) const;
    FieldElement pow(const FieldElement& a, long e) const;

    Rational trace(const FieldElement& a) const;
    Rational norm(const FieldElement& a) const;
    RatMatrix mult_matrix(const FieldElement& a) const; // column j = a * theta^j
    RatVec charpoly(const FieldElement& a) const;       // monic, low to high
    bool is_algebraic_integer(const FieldElement& a) const;

    // Exact sign at a real embedding; 0 iff a == 0.
    int sign_at(const FieldElement& a, int embedding) const;
    int sign_at(const RealAlgebraic& x) const { return sign_at(x.x, x.embedding); }
    // Rational enclosure of a at the given embedding, root interval refined
    // to width <= 2^-bits.
    RatInterval enclose(const FieldElement& a, int embedding, int bits) const;
    RootInterval root_interval(int embedding) const;
    double approx(const FieldElement& a, int embedding) const;

    // Maximal order: Z-basis as columns of power-basis coordinates, HNF.
    const RatMatrix& maximal_order() const;
    Integer index() const; // [O_F : Z[theta]]
    Integer discriminant() const;

    std::string element_str(const FieldElement& a) const;

private:
    NumberField() = default;
    void isolate_roots();
    void refine(int embedding, const Rational& width) const;
    Rational eval_f(const Rational& x) const;
    RatInterval eval_interval(const FieldElement& a, const RootInterval& r) const;

    int n_ = 0;
    IntVec f_;
    Integer disc_f_;
    std::vector<FieldElement> theta_pow_; // theta^k reduced, k = 0..2n-2
    RatVec power_traces_;                // Tr(theta^k), k = 0..2n-2
    std::vector<int> sign_f_lo_;         // sign of f at each interval's lower end

    mutable std::mutex mu_;
    mutable std::vector<RootInterval> roots_;
    mutable std::once_flag order_once_;
    mutable RatMatrix order_;
};

// Trace-dual basis: Tr(w_i w*_j) = delta_ij.
std::vector<FieldElement> dual_basis(const NumberField& F, const std::vector<FieldElement>& w);

// Fractional ideal of the maximal order, stored as a canonical HNF basis.
class Ideal {
public:
    Ideal() = default;
    static Ideal from_basis(FieldPtr F, const RatMatrix& cols);
    static Ideal from_generators(FieldPtr F, const std::vector<FieldElement>& gens);
    static Ideal from_two_generators(FieldPtr F, const Integer& g1, const FieldElement& g2);
    static Ideal principal(FieldPtr F, const FieldElement& x);
    static Ideal unit(FieldPtr F);

    const FieldPtr& field() const { return F_; }
    const RatMatrix& basis_matrix() const { return B_; }
    std::vector<FieldElement> basis() const;
    Rational norm() const;
    bool contains(const FieldElement& x) const;
    RatVec coordinates(const FieldElement& x) const; // in this ideal's basis
    bool is_integral() const;
    bool is_theta_stable() const;

    Ideal operator*(const Ideal& o) const;
    Ideal inverse() const;
    Ideal pow(long e) const;
    Ideal operator+(const Ideal& o) const;
    friend bool operator==(const Ideal& a, const Ideal& b) { return a.B_ == b.B_; }
    friend bool operator!=(const Ideal& a, const Ideal& b) { return !(a == b); }

    std::string str() const;

private:
    FieldPtr F_;
    RatMatrix B_;
};

bool is_coprime(const Ideal& a, const Ideal& b);
bool congruent_mod_ideal(const FieldElement& x, const FieldElement& y, const Ideal& I);

// Canonical HNF of the Z-span of the given columns (rational entries).
RatMatrix lattice_hnf(const RatMatrix& cols, int n);

// Degree-one prime (l, theta - c) with c the least root of f mod l.
Ideal prime_over(FieldPtr F, long ell);

struct PrimeFactor {
    Ideal P;
    int e = 1; // ramification index
    int f = 1; // residue degree
};
// Prime ideals above p via Kummer-Dedekind; requires p not dividing the index.
std::vector<PrimeFactor> primes_above(FieldPtr F, long p);

// Z-basis (w_1..w_n) of a^{-1}f such that (w_1/l, w_2, ..., w_n) is a Z-basis
// of a^{-1}c^{-1}f.
std::vector<FieldElement> adapted_basis(const Ideal& a, const Ideal& f, const Ideal& c, long ell);

struct UnitData {
    std::vector<FieldElement> eps; // totally positive, = 1 mod f
    int sign_det_R = 1;            // sign det (log tau_i(eps_j))_{i,j<n}
};

// n = 2: computed from the fundamental unit; n >= 3: validates `supplied`.
UnitData unit_basis(FieldPtr F, const Ideal& f, const std::optional<std::vector<FieldElement>>& supplied = std::nullopt);
FieldElement fundamental_unit_quadratic(FieldPtr F);

struct GeneratorResult {
    int e = 0;
    FieldElement pi;
};
// (pi) = I^e with pi totally positive and pi = 1 mod f, e <= bound.
GeneratorResult totally_positive_generator(const Ideal& I, const Ideal& f, int bound,
                                           const std::optional<std::vector<FieldElement>>& units = std::nullopt);

// Sign of det(tau_i(w_j)), certified by rational interval arithmetic.
int sign_det_embeddings(const NumberField& F, const std::vector<FieldElement>& w);
// Sign of det(log tau_i(eps_j))_{i,j < n-1}; throws DependentUnits if no
// certified nonzero sign is reached.
int sign_det_log_units(const NumberField& F, const std::vector<FieldElement>& eps);

} // namespace eis
