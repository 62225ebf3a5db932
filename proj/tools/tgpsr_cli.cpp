// Command-line front end. Talks to the simulator through the C interface only.
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tgpsr/tgpsr.h"

namespace {

int report(tgpsr_status s, const char* what) {
    std::cerr << "tgpsr: " << what << ": " << tgpsr_last_error() << "\n";
    return s == TGPSR_E_IO ? 3 : 2;
}

std::string read_text(tgpsr_status (*get)(const void*, const char*, char*, size_t, size_t*), const void* h,
                      const char* arg, tgpsr_status& status) {
    size_t need = 0;
    get(h, arg, nullptr, 0, &need);
    std::string buf(need, '\0');
    status = get(h, arg, buf.data(), buf.size(), &need);
    if (status == TGPSR_OK && !buf.empty()) buf.pop_back();
    return buf;
}

tgpsr_status describe_thunk(const void* h, const char*, char* buf, size_t cap, size_t* need) {
    return tgpsr_config_describe(static_cast<const tgpsr_config*>(h), buf, cap, need);
}

tgpsr_status format_thunk(const void* h, const char* fmt, char* buf, size_t cap, size_t* need) {
    return tgpsr_results_format(static_cast<const tgpsr_results*>(h), fmt, buf, cap, need);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cover-set selection and two-hop geographic routing for image sensor networks"};

    std::string config_path;
    std::string out_path;
    std::string summary_path;
    std::string format = "csv";
    bool dry_run = false;
    std::vector<std::string> extra;

    // Flag name -> config key. Values are passed through as text and checked
    // by the library, so errors name the key.
    const std::vector<std::pair<std::string, std::string>> passthrough = {
        {"--scenario", "scenario"},         {"--nodes", "nodes"},
        {"--area", "area"},                 {"--range", "range"},
        {"--seed", "seed"},                 {"--runs", "runs"},
        {"--alpha", "alpha"},               {"--beta", "beta"},
        {"--path-factor", "path-factor"},   {"--capture-rate", "capture-rate"},
        {"--images-per-burst", "images-per-burst"},
    };
    std::map<std::string, std::string> values;
    for (const auto& [flag, key] : passthrough) app.add_option(flag, values[key], "config key '" + key + "'");

    app.add_option("--config", config_path, "flat key = value file; flags override it")->check(CLI::ExistingFile);
    app.add_option("--set", extra, "any config key as key=value (repeatable)");
    app.add_option("--out", out_path, "write per-run results here instead of stdout");
    app.add_option("--summary", summary_path, "write the per-scenario mean/stddev table here");
    app.add_option("--format", format, "per-run output format")->check(CLI::IsMember({"csv", "structured"}));
    app.add_flag("--dry-run", dry_run, "print the resolved configuration and exit");

    CLI11_PARSE(app, argc, argv);

    tgpsr_config* cfg = nullptr;
    if (tgpsr_config_create(&cfg) != TGPSR_OK) return report(TGPSR_E_INTERNAL, "config");
    struct Guard {
        tgpsr_config* c;
        tgpsr_results* r = nullptr;
        ~Guard() {
            tgpsr_results_destroy(r);
            tgpsr_config_destroy(c);
        }
    } guard{cfg};

    if (!config_path.empty()) {
        if (auto s = tgpsr_config_load_file(cfg, config_path.c_str()); s != TGPSR_OK) return report(s, "config");
    }
    for (const auto& [flag, key] : passthrough) {
        if (app.count(flag) == 0) continue;
        if (auto s = tgpsr_config_set(cfg, key.c_str(), values[key].c_str()); s != TGPSR_OK) return report(s, flag.c_str());
    }
    for (const auto& kv : extra) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "tgpsr: --set expects key=value, got '" << kv << "'\n";
            return 2;
        }
        const std::string key = kv.substr(0, eq);
        if (auto s = tgpsr_config_set(cfg, key.c_str(), kv.substr(eq + 1).c_str()); s != TGPSR_OK)
            return report(s, "--set");
    }

    tgpsr_status s = TGPSR_OK;
    if (dry_run) {
        const std::string text = read_text(describe_thunk, cfg, nullptr, s);
        if (s != TGPSR_OK) return report(s, "describe");
        std::cout << text;
        return 0;
    }

    if (s = tgpsr_run(cfg, &guard.r); s != TGPSR_OK) return report(s, "run");

    if (out_path.empty()) {
        const std::string text = read_text(format_thunk, guard.r, format.c_str(), s);
        if (s != TGPSR_OK) return report(s, "format");
        std::cout << text;
    } else if (s = tgpsr_results_export(guard.r, format.c_str(), out_path.c_str()); s != TGPSR_OK) {
        return report(s, "export");
    }
    if (!summary_path.empty()) {
        if (s = tgpsr_results_export_summary(guard.r, summary_path.c_str()); s != TGPSR_OK) return report(s, "summary");
    }
    return 0;
}
