#pragma once

#include "eisenstein/dedekind.hpp"
#include "eisenstein/numberfield.hpp"
#include "eisenstein/padic.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eis::cli {

inline constexpr const char* kConfigSchema = "eisenstein-config/1";
inline constexpr const char* kReportSchema = "eisenstein-report/1";

enum Exit { kOk = 0, kConfigError = 2, kPrecondition = 3, kCrossCheck = 4 };

struct ClassSpec {
    Ideal a;
    ChiValue chi;
};

struct CocycleSpec {
    long ell = 5;
    int trials = 10;
    unsigned seed = 1;
    int degree = 0; // degree of the test polynomial P
};

// Parsed and validated job description. Every number is given as a string in
// the file.
struct JobConfig {
    nlohmann::json raw;
    FieldPtr F;
    IntVec poly;
    Ideal f, a, c;
    long ell = 0;
    std::optional<std::vector<FieldElement>> units;
    std::optional<std::vector<FieldElement>> basis;
    std::vector<long> ks;
    std::optional<long> kmax;
    std::optional<long> p;
    long precision = 4;
    std::vector<FieldElement> pis;
    std::vector<ClassSpec> classes;
    std::vector<Rational> s; // weight points omega^branch <.>^s
    long branch = 0;
    std::optional<CocycleSpec> cocycle;
};

// Config errors (Errc::Config) for schema problems; number-theoretic
// failures surface with their own codes.
JobConfig parse_config(const nlohmann::json& j, const std::string& command);
JobConfig load_config(const std::string& path, const std::string& command);

struct RunOptions {
    int threads = 1;
    bool crosscheck = true;
    std::optional<long> precision;
    DedekindCache* cache = nullptr;
};

struct Report {
    nlohmann::json body;
    int exit_code = kOk;
};

Report cmd_zeta(const JobConfig& cfg, const RunOptions& opt);
Report cmd_padic_zeta(const JobConfig& cfg, const RunOptions& opt);
Report cmd_oov(const JobConfig& cfg, const RunOptions& opt);
Report cmd_cocycle_check(const JobConfig& cfg, const RunOptions& opt);
Report cmd_selftest(const RunOptions& opt);

int exit_code_for(Errc c);

} // namespace eis::cli
