#pragma once

#include "eisenstein/zeta.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace eis {

// Element of Z_p known modulo p^M. Every operation reports a precision that
// is a lower bound for the digits it actually determines.
class PadicInt {
public:
    PadicInt() = default;
    PadicInt(long p, long M, const Integer& residue);
    static PadicInt from_rational(const Rational& q, long p, long M); // NotPIntegral
    static PadicInt exact_zero(long p, long M) { return PadicInt(p, M, 0); }

    long p() const { return p_; }
    long precision() const { return M_; }
    const Integer& residue() const { return r_; }
    // Valuation, capped at the precision.
    long valuation() const;
    bool is_zero() const { return r_ == 0; }

    PadicInt with_precision(long M) const; // only lowers
    PadicInt operator-() const;
    friend PadicInt operator+(const PadicInt& a, const PadicInt& b);
    friend PadicInt operator-(const PadicInt& a, const PadicInt& b);
    friend PadicInt operator*(const PadicInt& a, const PadicInt& b);
    PadicInt pow(unsigned long e) const;
    PadicInt inverse() const; // requires a unit
    // x / p^v(x), precision M - v(x); PrecisionExhausted when x = 0 mod p^M.
    PadicInt unit_part() const;
    // Valuation of the difference is at least m.
    bool agrees(const PadicInt& o, long m) const;
    // Residue of a rational compared at this precision.
    bool agrees(const Rational& q, long m) const;

    std::string str() const;

private:
    long p_ = 0;
    long M_ = 0;
    Integer r_;
};

// Teichmuller representative of a unit; {+1,-1} when p = 2.
PadicInt teichmuller(const PadicInt& x);
// Iwasawa logarithm (log p = 0): log of <u> for the unit part u. Precision
// drops by v(x).
PadicInt iwasawa_log(const PadicInt& x);
// exp on pZ_p (4Z_2 for p = 2).
PadicInt padic_exp(const PadicInt& x);
// <u> = u / omega(u) for a unit u.
PadicInt one_unit_part(const PadicInt& u);

// Measure mu_l(A, Q, v) on X_v = v + Z_p^n, from zeta data on a^{-1} f_0 with
// f_0 the prime-to-p part of f. Coordinates j of a box v + j + p^r Z_p^n
// correspond to the field element 1 + w.j.
struct MeasureHandle {
    ZetaData Z;
    Ideal f;  // full conductor
    Ideal f0; // prime-to-p part
    Ideal f1; // p-part
    long p = 0;
    std::shared_ptr<const ChainMeasure> mu;
    IntVec vnum; // v = vnum / vden
    Integer vden;
};

MeasureHandle make_measure(FieldPtr F, const Ideal& f, const Ideal& a, const Ideal& c, long ell, const UnitData& units,
                           long p, const std::optional<std::vector<FieldElement>>& basis = std::nullopt);

// Psi_l(A, 1, Q, (v + a) / p^r).
Rational measure_box(const MeasureHandle& h, const IntVec& a, long r);

enum class RegionKind {
    UnitsF,      // O*_{p,f}
    IdealF,      // O_{p,b,f}
    IdealUnitsF, // O*_{p,b,f}
    Bold,        // O: away from pi_i O at the primes p_i, O*_{p,f} elsewhere
    Lattice,     // a + M Z_p^n
};

struct PiData {
    Ideal P;
    int e = 1; // (pi) = P^e
    FieldElement pi;
};
// Totally positive pi = 1 mod f generating P^e with e minimal.
PiData make_pi_data(const Ideal& P, const Ideal& f, int bound = 12);
// Validates a supplied generator.
PiData make_pi_data(const Ideal& P, const Ideal& f, const FieldElement& pi);

// Set of classes j mod p^t, indexed by sum_i (j_i mod p^t) p^{ti}.
struct Region {
    RegionKind kind = RegionKind::UnitsF;
    long p = 0;
    int n = 0;
    int t = 0;
    std::vector<bool> member;
    std::string descriptor;

    bool contains(const std::vector<long>& j) const;
    size_t count() const;
};

struct RegionParams {
    std::optional<Ideal> b;              // IdealF, IdealUnitsF
    std::vector<PiData> pis;             // Bold
    IntVec a;                            // Lattice offset
    std::optional<IntegerMatrix> lattice; // Lattice M; p^r I when absent
    long r = 0;
    std::optional<int> level;            // forced t, LevelTooSmall if too small
};
Region region_build(const MeasureHandle& h, RegionKind kind, const RegionParams& params = {});
// Minimal level for which the kind is well defined.
int region_min_level(const MeasureHandle& h, RegionKind kind, const RegionParams& params = {});

struct RiemannOptions {
    int threads = 1;
    int guard = 6;      // extra p-adic digits carried by the arithmetic
    int max_refine = 6; // extra levels for cells of high valuation
};

// Riemann sum with its precision report. `precision` bounds the arithmetic
// (per-cell valuation losses included); `certified` is the valuation of the
// difference with the sum one level lower, capped by `precision`.
struct PadicEstimate {
    PadicInt value;
    long level = 0;
    long certified = 0;
    size_t cells = 0;
};

// sum over j mod p^M of P(v + j) mu(v + j + p^M Z_p^n), restricted to the
// region when one is given.
PadicEstimate integrate_poly(const MeasureHandle& h, const MultiPoly& P, long M, const RiemannOptions& opt = {},
                             const Region* region = nullptr);
// sgn(det M) Psi_l(M^{-1}A, M^t P, M^{-1}Q, M^{-1}(v + a)), the exact value of
// the integral of P over v + a + M Z_p^n.
Rational sublattice_exact(const MeasureHandle& h, const MultiPoly& P, const IntVec& a, const IntegerMatrix& M);

// Point of weight space: the character y -> omega(y)^j <y>^t with t in Z_p
// (p-integral rational).
struct WeightPoint {
    long j = 0;
    Rational t = 0;
    static WeightPoint minus_k(long k) { return {-k, Rational(-k)}; }
    static WeightPoint cyclotomic(const Rational& s) { return {0, s}; }
};

// Integral over the region of s(P(x)_p)^{-1}, P(x)_p the unit part of
// P(x) = N(ac) N(x). At s = -k on O*_{p,f} this is zeta*_{f,c}(a, -k).
PadicEstimate padic_zeta(const MeasureHandle& h, const Region& region, const WeightPoint& s, long M,
                         const RiemannOptions& opt = {});
// Several s = -k at once, one pass over the cells.
std::vector<PadicEstimate> padic_zeta_minus_k(const MeasureHandle& h, const Region& region, const std::vector<long>& ks,
                                              long M, const RiemannOptions& opt = {});

// Integrals of (log_p N x)^k over O for k = 0..kmax. Cells whose norm has
// valuation c carry precision M - c and are refined until that reaches the
// target or max_refine is used up.
std::vector<PadicEstimate> oov_integral(const MeasureHandle& h, const std::vector<PiData>& pis, long kmax, long M,
                                        const RiemannOptions& opt = {});

// zeta_d^e for d | p - 1, through the Teichmuller lift of the least
// primitive root; d | 2 when p = 2. ResidueFieldMismatch otherwise.
struct ChiValue {
    long order = 1;
    long exponent = 0;
};
PadicInt root_of_unity(const ChiValue& x, long p, long M);

struct ClassEntry {
    const MeasureHandle* h = nullptr;
    std::optional<ChiValue> chi; // chi(ac)
};
// sum over classes of chi(ac) zeta_{f,c,p}(a, <.>^s).
PadicEstimate L_assemble(const std::vector<ClassEntry>& classes, long p, const Rational& s, long M,
                         const RiemannOptions& opt = {});

} // namespace eis
