#pragma once

#include "eisenstein/dedekind.hpp"
#include "eisenstein/matrix.hpp"
#include "eisenstein/multipoly.hpp"

#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace eis {

// Element of Gamma_l: invertible, entries l-integral, det an l-unit, first
// column = (unit, 0, ..., 0) mod l.
class GammaEllMatrix {
public:
    GammaEllMatrix() = default;
    GammaEllMatrix(RatMatrix m, long ell);
    static GammaEllMatrix integral(const IntegerMatrix& m, long ell) { return GammaEllMatrix(to_rat(m), ell); }

    const RatMatrix& matrix() const { return m_; }
    long ell() const { return ell_; }
    int n() const { return m_.rows(); }
    RatVec first_column() const { return m_.col(0); }
    GammaEllMatrix inverse() const;
    friend GammaEllMatrix operator*(const GammaEllMatrix& a, const GammaEllMatrix& b);
    friend bool operator==(const GammaEllMatrix& a, const GammaEllMatrix& b) { return a.ell_ == b.ell_ && a.m_ == b.m_; }

private:
    RatMatrix m_;
    long ell_ = 0;
};

bool is_in_gamma_ell(const RatMatrix& m, long ell);

using CocycleTuple = std::vector<GammaEllMatrix>;

// Formal Z-linear combination of n-tuples.
class CocycleChain {
public:
    struct Term {
        Integer coeff;
        CocycleTuple tuple;
    };
    void add(const Integer& c, CocycleTuple t);
    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    CocycleChain scaled(const Integer& c) const;
    CocycleChain operator+(const CocycleChain& o) const;

private:
    std::vector<Term> terms_;
};

struct CocycleArgs {
    MultiPoly P;
    FormsMatrix Q;
    RatVec v;
};

// P(X sigma^t) = sum_r P_r(sigma) X^r / r!; zero coefficients omitted.
std::map<Exponent, Rational> pr_coefficients(const MultiPoly& P, const RatMatrix& sigma);
inline std::map<Exponent, Rational> pr_coefficients(const MultiPoly& P, const IntegerMatrix& sigma) {
    return pr_coefficients(P, to_rat(sigma));
}

// Matrix whose i-th column is the first column of A_i, each column scaled by
// a positive rational to a primitive integer vector.
IntegerMatrix sigma_of_tuple(const CocycleTuple& A);

struct PsiOptions {
    bool plus = false;      // Psi_l^+ (average over Q and -Q)
    bool normalize = true;  // scale columns of sigma to primitive vectors
    DedekindCache* cache = nullptr;
};

// (-1)^n sgn(det sigma) sum_r P_r(sigma)/((r+1)! l^|r|) D_l(sigma, 1+r, Q, v).
Rational psi_ell_sigma(const RatMatrix& sigma, const CocycleArgs& args, long ell, const PsiOptions& opt = {});
Rational psi_ell(const CocycleTuple& A, const CocycleArgs& args, long ell, const PsiOptions& opt = {});
Rational psi_ell_plus(const CocycleTuple& A, const CocycleArgs& args, long ell, PsiOptions opt = {});
Rational psi_ell_chain(const CocycleChain& c, const CocycleArgs& args, long ell, const PsiOptions& opt = {});

using Evaluator = std::function<Rational(const CocycleArgs&)>;
// sgn(det g) sum_{r in Z^n / g Z^n} f(g^t P, g^{-1} Q, g^{-1}(r + v)), g integral.
Rational module_action(const IntegerMatrix& gamma, const Evaluator& f, const CocycleArgs& args);
CocycleTuple act_left(const GammaEllMatrix& g, const CocycleTuple& A);

// Psi_l(c, 1, Q, v) for a fixed chain and Q as a function of v. Values are
// numerators over denominator(), summed over the chain with signs folded in.
class ChainMeasure {
public:
    ChainMeasure(const CocycleChain& c, const FormsMatrix& Q, long ell);
    int n() const { return n_; }
    long ell() const { return ell_; }
    const Integer& denominator() const { return den_; }
    // v = N / D with D > 0. Integer numerator of the measure.
    Integer numerator(const IntVec& N, const Integer& D) const;
    // Same with 128-bit arithmetic; returns false if the inputs are too large.
    bool numerator_fast(const __int128* N, __int128 D, __int128& out) const;
    Rational value(const RatVec& v) const;
    bool degenerate() const { return kernels_.empty(); }

private:
    struct Kernel {
        Integer coeff;          // chain coefficient times (-1)^n sgn det sigma
        long coeff64 = 0;
        IntegerMatrix sl;       // sigma_l
        IntegerMatrix adj;      // adj(sigma_l)
        Integer det;            // det sigma_l
        std::vector<long> diag; // HNF diagonal of sigma_l
        std::shared_ptr<B1Table> table;
        std::vector<__int128> adj128;
        __int128 det128 = 0;
        long long adj_max = 0;
        bool fast = false;
    };
    int n_ = 0;
    long ell_ = 0;
    Integer den_;
    std::vector<Kernel> kernels_;
};

} // namespace eis
