#pragma once

#include "eisenstein/rational.hpp"

#include <string>
#include <vector>

namespace eis::checks {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    double limit_seconds = 0; // 0: no runtime bound
};

// Quick mode shrinks instance counts and precisions and drops the runtime
// bounds; it is what `selftest` runs.
struct CheckOptions {
    bool quick = false;
    int threads = 1;
};

CheckResult exact_zeta_values(const CheckOptions& o);   // 1
CheckResult integrality_sweep(const CheckOptions& o);   // 2
CheckResult cocycle_relations(const CheckOptions& o);   // 3
CheckResult fast_path(const CheckOptions& o);           // 4
CheckResult measure_consistency(const CheckOptions& o); // 5
CheckResult interpolation(const CheckOptions& o);       // 6
CheckResult order_of_vanishing(const CheckOptions& o);  // 7
CheckResult invariance(const CheckOptions& o);          // 8
CheckResult twice_smoothed(const CheckOptions& o);      // 9

std::vector<CheckResult> run_all(const CheckOptions& o);

// zeta_F(-1) and zeta_F(-3) of the real quadratic field of discriminant D by
// Siegel's divisor-sum formulas.
Rational siegel_zeta(long D, int k);

} // namespace eis::checks
