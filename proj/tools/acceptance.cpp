// One line per acceptance criterion; exit status 1 if any fails.
#include "checks.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

int main(int argc, char** argv) {
    eis::checks::CheckOptions o;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) o.quick = true;
        else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) o.threads = std::atoi(argv[++i]);
    }
    using Fn = eis::checks::CheckResult (*)(const eis::checks::CheckOptions&);
    const Fn all[] = {eis::checks::exact_zeta_values,   eis::checks::integrality_sweep, eis::checks::cocycle_relations,
                      eis::checks::fast_path,           eis::checks::measure_consistency, eis::checks::interpolation,
                      eis::checks::order_of_vanishing,  eis::checks::invariance,        eis::checks::twice_smoothed};
    int failed = 0;
    for (Fn f : all) {
        auto r = f(o);
        std::printf("criterion %d %s: %s (%.1f s", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
        if (r.limit_seconds > 0) std::printf(", limit %.0f s", r.limit_seconds);
        std::printf(") %s\n", r.detail.c_str());
        std::fflush(stdout);
        failed += !r.pass;
    }
    return failed ? 1 : 0;
}
