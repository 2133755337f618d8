#include "job.hpp"

#include "checks.hpp"
#include "eisenstein/cocycle.hpp"
#include "eisenstein/error.hpp"
#include "eisenstein/zeta.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <thread>

namespace eis::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) { fail(Errc::Config, where + ": " + what); }

const std::string& str(const json& j, const std::string& where) {
    if (!j.is_string()) bad(where, "expected a string (numbers are written as strings)");
    return j.get_ref<const std::string&>();
}

Integer integer(const json& j, const std::string& where) { return parse_integer(str(j, where)); }
Rational rational(const json& j, const std::string& where) { return parse_rational(str(j, where)); }

long small(const json& j, const std::string& where, long lo, long hi) {
    Integer z = integer(j, where);
    if (z < lo || z > hi) bad(where, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return z.get_si();
}

void only_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) bad(where, "expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) bad(where, "unknown key '" + k + "'");
}

FieldElement element(const FieldPtr& F, const json& j, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != F->degree())
        bad(where, "expected " + std::to_string(F->degree()) + " power-basis coordinates");
    RatVec c;
    for (size_t i = 0; i < j.size(); ++i) c.push_back(rational(j[i], where + "[" + std::to_string(i) + "]"));
    return F->from_coords(c);
}

std::vector<FieldElement> elements(const FieldPtr& F, const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) bad(where, "expected a non-empty list of elements");
    std::vector<FieldElement> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(element(F, j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

// "1" | {"generators": [...]} | {"prime_over": "11"} | {"two_generators": ["11", [..]]}
Ideal ideal(const FieldPtr& F, const json& j, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() != "1") bad(where, "the only string form of an ideal is \"1\"");
        return Ideal::unit(F);
    }
    if (!j.is_object() || j.size() != 1) bad(where, "expected \"1\" or an object with one key");
    if (j.contains("generators")) return Ideal::from_generators(F, elements(F, j["generators"], where + ".generators"));
    if (j.contains("prime_over")) return prime_over(F, small(j["prime_over"], where + ".prime_over", 2, 1L << 30));
    if (j.contains("two_generators")) {
        const json& t = j["two_generators"];
        if (!t.is_array() || t.size() != 2) bad(where + ".two_generators", "expected [integer, element]");
        return Ideal::from_two_generators(F, integer(t[0], where + ".two_generators[0]"),
                                          element(F, t[1], where + ".two_generators[1]"));
    }
    bad(where, "unknown ideal form");
}

json padic_json(const PadicEstimate& e, long requested) {
    return {{"p", std::to_string(e.value.p())},
            {"M_requested", std::to_string(requested)},
            {"M_certified", std::to_string(e.certified)},
            {"precision", std::to_string(e.value.precision())},
            {"value_residue", to_string(e.value.residue())},
            {"valuation", std::to_string(e.value.valuation())},
            {"level", std::to_string(e.level)}};
}

json elements_json(const NumberField& F, const std::vector<FieldElement>& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(F.element_str(x));
    return a;
}

json input_json(const JobConfig& cfg) {
    json in = {{"field", cfg.F->poly_str()},
               {"f", cfg.f.str()},
               {"a", cfg.a.str()},
               {"c", cfg.c.str()},
               {"ell", std::to_string(cfg.ell)}};
    if (cfg.p) in["p"] = std::to_string(*cfg.p);
    return in;
}

UnitData units_of(const JobConfig& cfg) { return unit_basis(cfg.F, cfg.f, cfg.units); }

// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception
// in index order is rethrown.
template <class Fn>
void parallel_for(size_t n, int threads, Fn fn) {
    std::vector<std::exception_ptr> errs(n);
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i; (i = next++) < n;) {
            try {
                fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int i = 1; i < t; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

RiemannOptions riemann(const RunOptions& opt) {
    RiemannOptions r;
    r.threads = opt.threads;
    return r;
}

long precision_of(const JobConfig& cfg, const RunOptions& opt) {
    long M = opt.precision.value_or(cfg.precision);
    if (M < 1 || M > 40) fail(Errc::Config, "precision must lie in [1, 40]");
    return M;
}

// Power-basis form at the largest embedding.
FormsMatrix power_form(const FieldPtr& F) {
    std::vector<FieldElement> row;
    FieldElement x = F->one();
    for (int i = 0; i < F->degree(); ++i) {
        row.push_back(x);
        x = F->mul(x, F->theta());
    }
    return FormsMatrix::embedded(F, {row}, {F->degree() - 1});
}

} // namespace

int exit_code_for(Errc c) {
    if (c == Errc::Config) return kConfigError;
    if (c == Errc::CrossCheckFailure) return kCrossCheck;
    return kPrecondition;
}

JobConfig parse_config(const json& j, const std::string& command) {
    only_keys(j, "config", {"schema", "field", "f", "a", "c", "ell", "units", "basis", "k", "k_max", "p", "precision",
                            "pi", "classes", "s", "branch", "cocycle"});
    if (!j.contains("schema") || str(j["schema"], "schema") != kConfigSchema)
        bad("schema", std::string("expected \"") + kConfigSchema + "\"");
    JobConfig cfg;
    cfg.raw = j;

    if (!j.contains("field")) bad("config", "missing 'field'");
    only_keys(j["field"], "field", {"polynomial"});
    const json& poly = j["field"].value("polynomial", json());
    if (!poly.is_array() || poly.size() < 3) bad("field.polynomial", "expected at least three coefficients, low to high");
    for (size_t i = 0; i < poly.size(); ++i) cfg.poly.push_back(integer(poly[i], "field.polynomial[" + std::to_string(i) + "]"));
    if (cfg.poly.back() != 1) bad("field.polynomial", "leading coefficient must be 1");
    cfg.F = NumberField::create(cfg.poly);
    const FieldPtr& F = cfg.F;

    cfg.f = j.contains("f") ? ideal(F, j["f"], "f") : Ideal::unit(F);
    cfg.a = j.contains("a") ? ideal(F, j["a"], "a") : Ideal::unit(F);
    if (j.contains("ell")) cfg.ell = small(j["ell"], "ell", 2, 1L << 30);
    if (j.contains("c")) {
        cfg.c = ideal(F, j["c"], "c");
        Rational N = cfg.c.norm();
        if (!is_integer(N) || N > (1L << 30) || !is_prime(N.get_num().get_si()))
            fail(Errc::NoDegreeOnePrime, "c must have prime norm");
        long ln = N.get_num().get_si();
        if (cfg.ell != 0 && cfg.ell != ln) bad("ell", "does not match the norm of c");
        cfg.ell = ln;
    } else if (cfg.ell != 0) {
        cfg.c = prime_over(F, cfg.ell);
    } else if (command != "cocycle-check") {
        bad("config", "either 'c' or 'ell' is required");
    }
    if (j.contains("units")) cfg.units = elements(F, j["units"], "units");
    if (j.contains("basis")) cfg.basis = elements(F, j["basis"], "basis");

    if (j.contains("k")) {
        const json& k = j["k"];
        if (k.is_array()) {
            for (size_t i = 0; i < k.size(); ++i) cfg.ks.push_back(small(k[i], "k[" + std::to_string(i) + "]", 0, 40));
        } else {
            only_keys(k, "k", {"from", "to"});
            if (!k.contains("from") || !k.contains("to")) bad("k", "range needs 'from' and 'to'");
            long a = small(k["from"], "k.from", 0, 40), b = small(k["to"], "k.to", 0, 40);
            if (a > b) bad("k", "empty range");
            for (long x = a; x <= b; ++x) cfg.ks.push_back(x);
        }
        if (cfg.ks.empty()) bad("k", "no values");
    } else {
        cfg.ks = {0, 1, 2};
    }
    if (j.contains("k_max")) cfg.kmax = small(j["k_max"], "k_max", 0, 12);
    if (j.contains("p")) {
        cfg.p = small(j["p"], "p", 2, 1L << 20);
        if (!is_prime(*cfg.p)) bad("p", "not a prime");
    }
    if (j.contains("precision")) cfg.precision = small(j["precision"], "precision", 1, 40);
    if (j.contains("pi")) cfg.pis = elements(F, j["pi"], "pi");
    if (j.contains("s")) {
        const json& s = j["s"];
        if (!s.is_array()) bad("s", "expected a list");
        for (size_t i = 0; i < s.size(); ++i) cfg.s.push_back(rational(s[i], "s[" + std::to_string(i) + "]"));
    }
    if (j.contains("branch")) cfg.branch = small(j["branch"], "branch", -(1L << 20), 1L << 20);
    if (j.contains("classes")) {
        const json& cl = j["classes"];
        if (!cl.is_array() || cl.empty()) bad("classes", "expected a non-empty list");
        for (size_t i = 0; i < cl.size(); ++i) {
            std::string w = "classes[" + std::to_string(i) + "]";
            only_keys(cl[i], w, {"a", "chi"});
            if (!cl[i].contains("a") || !cl[i].contains("chi")) bad(w, "needs 'a' and 'chi'");
            only_keys(cl[i]["chi"], w + ".chi", {"order", "exponent"});
            ClassSpec c;
            c.a = ideal(F, cl[i]["a"], w + ".a");
            c.chi.order = small(cl[i]["chi"].value("order", json("1")), w + ".chi.order", 1, 1L << 20);
            c.chi.exponent = small(cl[i]["chi"].value("exponent", json("0")), w + ".chi.exponent", 0, 1L << 20);
            cfg.classes.push_back(c);
        }
    }
    if (j.contains("cocycle")) {
        const json& c = j["cocycle"];
        only_keys(c, "cocycle", {"ell", "trials", "seed", "degree"});
        CocycleSpec s;
        if (c.contains("ell")) s.ell = small(c["ell"], "cocycle.ell", 2, 97);
        if (!is_prime(s.ell)) bad("cocycle.ell", "not a prime");
        if (c.contains("trials")) s.trials = static_cast<int>(small(c["trials"], "cocycle.trials", 1, 10000));
        if (c.contains("seed")) s.seed = static_cast<unsigned>(small(c["seed"], "cocycle.seed", 0, 1L << 31));
        if (c.contains("degree")) s.degree = static_cast<int>(small(c["degree"], "cocycle.degree", 0, 4));
        cfg.cocycle = s;
    }

    if ((command == "padic-zeta" || command == "oov") && !cfg.p) bad("config", "'p' is required for " + command);
    if (command == "cocycle-check" && !cfg.cocycle) bad("config", "'cocycle' is required for cocycle-check");
    return cfg;
}

JobConfig load_config(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) fail(Errc::Config, "cannot read " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(Errc::Config, path + ": " + e.what());
    }
    return parse_config(j, command);
}

Report cmd_zeta(const JobConfig& cfg, const RunOptions& opt) {
    const NumberField& F = *cfg.F;
    UnitData u = units_of(cfg);
    ZetaData Z = build_zeta_data(cfg.F, cfg.f, cfg.a, cfg.c, cfg.ell, u, cfg.basis);
    ZetaOptions zo;
    zo.crosscheck = opt.crosscheck;
    zo.crosscheck_max_k = 3;
    zo.cache = opt.cache;
    std::vector<ZetaResult> res(cfg.ks.size());
    parallel_for(cfg.ks.size(), opt.threads, [&](size_t i) { res[i] = zeta_minus_k_detailed(Z, cfg.ks[i], zo); });

    Report r;
    json rows = json::array();
    for (size_t i = 0; i < res.size(); ++i) {
        json row = {{"k", std::to_string(cfg.ks[i])},
                    {"value", to_string(res[i].value)},
                    {"denominator_is_ell_power", denominator_supported_on(res[i].value, {cfg.ell})},
                    {"crosschecked", res[i].crosschecked}};
        if (res[i].crosschecked) {
            json sf = json::array();
            for (const auto& x : res[i].single_form) sf.push_back(to_string(x));
            row["single_form"] = sf;
            if (res[i].plus_full) row["plus_all_forms"] = to_string(*res[i].plus_full);
        }
        rows.push_back(row);
    }
    json in = input_json(cfg);
    in["units"] = elements_json(F, u.eps);
    in["basis"] = elements_json(F, Z.w);
    in["rho"] = std::to_string(Z.rho);
    r.body = {{"input", in}, {"zeta", rows}};
    return r;
}

Report cmd_padic_zeta(const JobConfig& cfg, const RunOptions& opt) {
    long p = *cfg.p;
    long M = precision_of(cfg, opt);
    UnitData u = units_of(cfg);
    MeasureHandle h = make_measure(cfg.F, cfg.f, cfg.a, cfg.c, cfg.ell, u, p);
    Region R = region_build(h, RegionKind::UnitsF);
    RiemannOptions ro = riemann(opt);
    std::vector<PadicEstimate> est = padic_zeta_minus_k(h, R, cfg.ks, M, ro);

    ZetaData Zf = build_zeta_data(cfg.F, cfg.f, cfg.a, cfg.c, cfg.ell, u);
    ZetaOptions zo;
    zo.crosscheck = opt.crosscheck;
    zo.cache = opt.cache;
    std::vector<Rational> exact(cfg.ks.size());
    parallel_for(cfg.ks.size(), opt.threads,
                 [&](size_t i) { exact[i] = zeta_star_minus_k(Zf, p, cfg.ks[i], std::nullopt, zo).value; });

    Report r;
    json rows = json::array();
    for (size_t i = 0; i < est.size(); ++i) {
        PadicInt ex = PadicInt::from_rational(exact[i], p, est[i].value.precision());
        long agree = (est[i].value - ex).valuation();
        bool ok = agree >= est[i].certified;
        rows.push_back({{"k", std::to_string(cfg.ks[i])},
                        {"exact", to_string(exact[i])},
                        {"exact_residue", to_string(ex.residue())},
                        {"padic", padic_json(est[i], M)},
                        {"agreement_valuation", std::to_string(agree)},
                        {"agrees_to_certified_precision", ok}});
        if (!ok && opt.crosscheck) r.exit_code = kCrossCheck;
    }
    json weights = json::array();
    for (const auto& s : cfg.s) {
        PadicEstimate e = padic_zeta(h, R, WeightPoint{cfg.branch, s}, M, ro);
        weights.push_back({{"branch", std::to_string(cfg.branch)}, {"s", to_string(s)}, {"padic", padic_json(e, M)}});
    }
    json in = input_json(cfg);
    in["units"] = elements_json(*cfg.F, u.eps);
    in["precision"] = std::to_string(M);
    r.body = {{"input", in},
              {"region", {{"descriptor", R.descriptor}, {"level", std::to_string(R.t)}, {"classes", std::to_string(R.count())}}},
              {"interpolation", rows},
              {"weights", weights}};

    if (!cfg.classes.empty()) {
        std::vector<MeasureHandle> hs;
        hs.reserve(cfg.classes.size());
        for (const auto& c : cfg.classes) hs.push_back(make_measure(cfg.F, cfg.f, c.a, cfg.c, cfg.ell, u, p));
        std::vector<ClassEntry> entries;
        for (size_t i = 0; i < hs.size(); ++i) entries.push_back({&hs[i], cfg.classes[i].chi});
        json L = json::array();
        std::vector<Rational> ss = cfg.s.empty() ? std::vector<Rational>{0} : cfg.s;
        for (const auto& s : ss) L.push_back({{"s", to_string(s)}, {"padic", padic_json(L_assemble(entries, p, s, M, ro), M)}});
        r.body["L"] = L;
    }
    return r;
}

Report cmd_oov(const JobConfig& cfg, const RunOptions& opt) {
    long p = *cfg.p;
    long M = precision_of(cfg, opt);
    const NumberField& F = *cfg.F;
    UnitData u = units_of(cfg);
    MeasureHandle h = make_measure(cfg.F, cfg.f, cfg.a, cfg.c, cfg.ell, u, p);

    std::vector<PiData> pis;
    auto primes = primes_above(cfg.F, p);
    if (cfg.pis.empty()) {
        for (const auto& pf : primes)
            if (is_coprime(pf.P, cfg.f)) pis.push_back(make_pi_data(pf.P, cfg.f));
    } else {
        for (const auto& pi : cfg.pis) {
            auto it = std::find_if(primes.begin(), primes.end(), [&](const PrimeFactor& pf) { return pf.P.contains(pi); });
            if (it == primes.end()) fail(Errc::ShapeError, "pi = " + F.element_str(pi) + " lies in no prime above p");
            pis.push_back(make_pi_data(it->P, cfg.f, pi));
        }
    }
    long rr = static_cast<long>(pis.size());
    long kmax = cfg.kmax.value_or(rr);
    std::vector<PadicEstimate> est = oov_integral(h, pis, kmax, M, riemann(opt));

    Report r;
    json rows = json::array();
    for (long k = 0; k <= kmax; ++k) {
        const PadicEstimate& e = est[k];
        long v = e.value.valuation();
        long cert = std::min(v, e.certified);
        json row = {{"k", std::to_string(k)}, {"padic", padic_json(e, M)}, {"certified_valuation", std::to_string(cert)}};
        if (k < rr) {
            bool vanishes = v >= e.certified;
            row["status"] = vanishes ? "vanishes to certified precision" : "nonzero";
            if (!vanishes && opt.crosscheck) r.exit_code = kCrossCheck;
        } else {
            row["status"] = "no vanishing asserted";
        }
        rows.push_back(row);
    }
    json pj = json::array();
    for (const auto& d : pis) pj.push_back({{"prime", d.P.str()}, {"e", std::to_string(d.e)}, {"pi", F.element_str(d.pi)}});
    json in = input_json(cfg);
    in["precision"] = std::to_string(M);
    r.body = {{"input", in}, {"r", std::to_string(rr)}, {"pi", pj}, {"oov", rows}};
    return r;
}

Report cmd_cocycle_check(const JobConfig& cfg, const RunOptions&) {
    const CocycleSpec& s = *cfg.cocycle;
    int n = cfg.F->degree();
    long ell = s.ell;
    FormsMatrix Q = power_form(cfg.F);
    std::mt19937 g(s.seed);
    std::uniform_int_distribution<long> coef(-3, 3);
    long span = n == 2 ? 4 : 2;
    auto gamma = [&](long sp) {
        std::uniform_int_distribution<long> u(-sp, sp), k(-2, 2);
        while (true) {
            IntegerMatrix m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(i, j) = (i > 0 && j == 0) ? ell * k(g) : u(g);
            Integer d = det(m);
            if (d != 0 && !mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(ell))) return m;
        }
    };
    auto random_v = [&] {
        RatVec v(n);
        for (auto& c : v) {
            long d = 1 + static_cast<long>(g() % 9);
            c = ratio(Integer(static_cast<long>(g() % (2 * d + 1)) - d), Integer(d));
        }
        return v;
    };
    // homogeneous polynomial of the requested degree with random coefficients
    auto random_poly = [&] {
        MultiPoly P(n);
        std::vector<int> e(n, 0);
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == n - 1) {
                e[i] = left;
                P.add_term(e, Rational(coef(g)));
                return;
            }
            for (int a = 0; a <= left; ++a) {
                e[i] = a;
                rec(i + 1, left - a);
            }
        };
        rec(0, s.degree);
        if (P.is_zero()) {
            std::vector<int> e0(n, 0);
            e0[0] = s.degree;
            P.add_term(e0, 1);
        }
        return P;
    };

    int cocycle_fail = 0, equi_fail = 0, equi_done = 0;
    for (int t = 0; t < s.trials; ++t) {
        std::vector<GammaEllMatrix> h;
        for (int i = 0; i <= n; ++i) h.push_back(GammaEllMatrix::integral(gamma(span), ell));
        MultiPoly P = random_poly();
        CocycleArgs args{P, Q, random_v()};
        Rational sum = 0;
        for (int i = 0; i <= n; ++i) {
            CocycleTuple A;
            for (int j = 0; j <= n; ++j)
                if (j != i) A.push_back(h[j]);
            Rational val = psi_ell(A, args, ell);
            sum += (i % 2 == 0) ? val : Rational(-val);
        }
        if (sum != 0) ++cocycle_fail;
        IntegerMatrix gm = gamma(n == 2 ? 3 : 1);
        if (abs(det(gm)) > 30) continue;
        CocycleTuple A(h.begin(), h.begin() + n);
        Rational lhs = psi_ell(act_left(GammaEllMatrix::integral(gm, ell), A), args, ell);
        Evaluator f = [&](const CocycleArgs& x) { return psi_ell(A, x, ell); };
        if (lhs != module_action(gm, f, args)) ++equi_fail;
        ++equi_done;
    }
    Report r;
    r.body = {{"input",
               {{"field", cfg.F->poly_str()},
                {"ell", std::to_string(ell)},
                {"trials", std::to_string(s.trials)},
                {"seed", std::to_string(s.seed)},
                {"degree", std::to_string(s.degree)}}},
              {"cocycle_relation", {{"checked", std::to_string(s.trials)}, {"failures", std::to_string(cocycle_fail)}}},
              {"equivariance", {{"checked", std::to_string(equi_done)}, {"failures", std::to_string(equi_fail)}}}};
    if (cocycle_fail + equi_fail > 0) r.exit_code = kCrossCheck;
    return r;
}

Report cmd_selftest(const RunOptions& opt) {
    checks::CheckOptions co;
    co.quick = true;
    co.threads = opt.threads;
    Report r;
    json rows = json::array();
    for (const auto& c : checks::run_all(co)) {
        rows.push_back({{"id", std::to_string(c.id)}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        if (!c.pass) r.exit_code = kCrossCheck;
    }
    r.body = {{"checks", rows}};
    return r;
}

} // namespace eis::cli
