#pragma once

#include "eisenstein/cocycle.hpp"
#include "eisenstein/numberfield.hpp"

#include <optional>
#include <vector>

namespace eis {

// Inputs of the cocycle formula for the smoothed partial zeta function
// zeta_{f,c}(a, s) = zeta_f(ac, s) - N(c)^{1-s} zeta_f(a, s).
struct ZetaData {
    FieldPtr F;
    Ideal f, a, c;
    long ell = 0;
    UnitData units;
    std::vector<FieldElement> w;     // Z-basis of a^{-1} f, adapted to c
    std::vector<FieldElement> wdual; // trace dual of w
    std::vector<RatMatrix> A;        // w eps_i = w A_i
    MultiPoly P;                     // N(ac) N(sum w_j X_j)
    FormsMatrix Qfull;               // row i = tau_i(w*)
    std::vector<FormsMatrix> Qsingle;
    RatVec v;                        // (Tr w*_j)
    int sign_det_W = 0;
    int rho = 0;
    CocycleChain chain;
};

// Validates every invariant before returning. A basis may be supplied; it
// must be a Z-basis of a^{-1}f with (w_1/l, w_2, ...) a basis of a^{-1}c^{-1}f.
ZetaData build_zeta_data(FieldPtr F, const Ideal& f, const Ideal& a, const Ideal& c, long ell, const UnitData& units,
                         const std::optional<std::vector<FieldElement>>& basis = std::nullopt);

struct ZetaOptions {
    bool crosscheck = true;
    int crosscheck_max_k = 2; // cross-checks only run for k up to this
    DedekindCache* cache = nullptr;
};

struct ZetaResult {
    Rational value;
    std::vector<Rational> single_form; // one value per embedding, when cross-checked
    std::optional<Rational> plus_full; // Psi_l^+ with all n forms
    bool crosschecked = false;
};

// zeta_{f,c}(a, -k) = Psi_l(A, P^k, Q, v) with Q a single form. Throws
// CrossCheckFailure when the single-form and Psi_l^+ evaluations disagree.
ZetaResult zeta_minus_k_detailed(const ZetaData& Z, long k, const ZetaOptions& opt = {});
Rational zeta_minus_k(const ZetaData& Z, long k, const ZetaOptions& opt = {});

struct SmoothingCombination {
    // zeta_{f,c}(ab) - N(b)^{1+k} zeta_{f,c}(a); equals
    // zeta_{f,b}(ac) - N(c)^{1+k} zeta_{f,b}(a), which is checked.
    Rational twice_smoothed;
    // zeta_{f,bc}(a) = zeta_{f,c}(ab) + N(c)^{1+k} zeta_{f,b}(a)
    Rational composite;
};
// b, c: prime-norm ideals with distinct norms, both coprime to f.
SmoothingCombination combine_smoothing(FieldPtr F, const Ideal& f, const Ideal& a, const Ideal& b, long ell_b,
                                       const Ideal& c, long ell_c, long k, const UnitData& units,
                                       const ZetaOptions& opt = {});

// Integral ideal in the narrow ray class of a b^{-1} mod f, for a divisor b of
// f_p: a q with b q = (pi), pi >> 0, pi = 1 mod f.
struct ClassRep {
    Ideal b;
    Ideal rep;
};
ClassRep find_class_rep(const Ideal& a, const Ideal& b, const Ideal& f, const std::vector<Ideal>& avoid, int radius = 12);

struct StarTerm {
    Ideal b;
    int mu = 1;
    Ideal rep;
    Rational zeta;
};
struct ZetaStarResult {
    Rational value;
    std::vector<StarTerm> terms;
};

// Primes above p not dividing f.
std::vector<Ideal> primes_f_p(const Ideal& f, long p);

// sum over b | f_p of mu(b) N(b)^k zeta_{f,c}(a b^{-1}, -k). Class
// representatives are searched for unless class_data is given, in which case
// every divisor must be covered (MissingClassData otherwise).
ZetaStarResult zeta_star_minus_k(const ZetaData& Z, long p, long k,
                                 const std::optional<std::vector<ClassRep>>& class_data = std::nullopt,
                                 const ZetaOptions& opt = {});

} // namespace eis
