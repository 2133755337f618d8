#include "job.hpp"

#include "eisenstein/error.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace eis;
using namespace eis::cli;

namespace {

std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const nlohmann::json& j, const std::string& path) {
    std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) fail(Errc::Config, "cannot write " + path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact smoothed zeta values and p-adic zeta functions of totally real fields"};
    app.require_subcommand(1);

    std::string config, cache_dir, json_out;
    int threads = 1;
    bool no_crosscheck = false;
    long precision = 0;
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
    app.add_option("--cache", cache_dir, "directory holding the Dedekind sum cache");
    app.add_flag("--no-crosscheck", no_crosscheck, "skip the independent cross-checks");
    app.add_option("--precision", precision, "p-adic precision M (overrides the config)")->check(CLI::Range(1, 40));
    app.add_option("--json-out", json_out, "also write the report to this file");

    const char* with_config[] = {"zeta", "padic-zeta", "oov", "cocycle-check"};
    for (const char* name : with_config) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "job configuration (JSON)")->required();
        sub->fallthrough();
    }
    app.add_subcommand("selftest", "quick run of the invariant suites")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunOptions opt;
    opt.threads = threads;
    opt.crosscheck = !no_crosscheck;
    if (precision > 0) opt.precision = precision;
    DedekindCache cache;
    std::string cache_file;
    nlohmann::json out = {{"schema", kReportSchema}, {"command", command}, {"generated_at", utc_timestamp()}};

    int rc = kOk;
    try {
        if (!cache_dir.empty()) {
            std::filesystem::create_directories(cache_dir);
            cache_file = (std::filesystem::path(cache_dir) / "dedekind.cache").string();
            if (std::filesystem::exists(cache_file)) cache.load(cache_file);
            opt.cache = &cache;
        }
        Report r;
        if (command == "selftest") {
            r = cmd_selftest(opt);
        } else {
            JobConfig cfg = load_config(config, command);
            if (command == "zeta") r = cmd_zeta(cfg, opt);
            else if (command == "padic-zeta") r = cmd_padic_zeta(cfg, opt);
            else if (command == "oov") r = cmd_oov(cfg, opt);
            else r = cmd_cocycle_check(cfg, opt);
        }
        out.update(r.body);
        rc = r.exit_code;
        out["status"] = rc == kOk ? "ok" : "check failed";
        if (!cache_file.empty()) cache.save(cache_file);
    } catch (const Error& e) {
        rc = exit_code_for(e.code());
        out["status"] = "error";
        out["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
    } catch (const std::exception& e) {
        rc = kPrecondition;
        out["status"] = "error";
        out["error"] = {{"code", "internal"}, {"message", e.what()}};
    }
    try {
        emit(out, json_out);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kConfigError;
    }
    if (rc != kOk && out.contains("error")) std::cerr << out["error"]["message"].get<std::string>() << "\n";
    return rc;
}
