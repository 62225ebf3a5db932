#include "tgpsr/tgpsr.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "tgpsr/experiment.hpp"

struct tgpsr_config {
    std::string file_text;
    tgpsr::Overrides overrides;
    tgpsr::ScenarioConfig resolved;
};

struct tgpsr_results {
    std::vector<tgpsr::RunMetrics> runs;
};

namespace {

thread_local std::string last_error;

tgpsr_status fail(tgpsr_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

tgpsr_status map_code(tgpsr::ErrorCode c) {
    switch (c) {
    case tgpsr::ErrorCode::parse: return TGPSR_E_PARSE;
    case tgpsr::ErrorCode::io: return TGPSR_E_IO;
    case tgpsr::ErrorCode::internal: return TGPSR_E_INTERNAL;
    default: return TGPSR_E_INVALID_ARGUMENT;
    }
}

template <typename F>
tgpsr_status guarded(F&& body) {
    try {
        last_error.clear();
        return body();
    } catch (const tgpsr::Error& e) {
        return fail(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(TGPSR_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(TGPSR_E_INTERNAL, e.what());
    }
}

tgpsr_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
    if (needed != nullptr) *needed = text.size() + 1;
    if (buf == nullptr || cap < text.size() + 1) {
        if (buf != nullptr && cap > 0) buf[0] = '\0';
        return fail(TGPSR_E_BUFFER_TOO_SMALL, "buffer too small");
    }
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return TGPSR_OK;
}

} // namespace

extern "C" {

const char* tgpsr_version(void) { return "1.0.0"; }

const char* tgpsr_last_error(void) { return last_error.c_str(); }

tgpsr_status tgpsr_config_create(tgpsr_config** out) {
    if (out == nullptr) return fail(TGPSR_E_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        *out = new tgpsr_config{};
        return TGPSR_OK;
    });
}

void tgpsr_config_destroy(tgpsr_config* cfg) { delete cfg; }

tgpsr_status tgpsr_config_load_file(tgpsr_config* cfg, const char* path) {
    if (cfg == nullptr || path == nullptr) return fail(TGPSR_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::ifstream f(path);
        if (!f) return fail(TGPSR_E_IO, std::string("cannot read config file '") + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        cfg->resolved = tgpsr::parse_config(ss.str(), cfg->overrides);
        cfg->file_text = ss.str();
        return TGPSR_OK;
    });
}

tgpsr_status tgpsr_config_set(tgpsr_config* cfg, const char* key, const char* value) {
    if (cfg == nullptr || key == nullptr || value == nullptr) return fail(TGPSR_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto next = cfg->overrides;
        next.emplace_back(key, value);
        cfg->resolved = tgpsr::parse_config(cfg->file_text, next);
        cfg->overrides = std::move(next);
        return TGPSR_OK;
    });
}

tgpsr_status tgpsr_config_describe(const tgpsr_config* cfg, char* buf, size_t cap, size_t* needed) {
    if (cfg == nullptr) return fail(TGPSR_E_INVALID_ARGUMENT, "null config");
    return guarded([&] { return copy_out(tgpsr::describe(cfg->resolved), buf, cap, needed); });
}

tgpsr_status tgpsr_run(const tgpsr_config* cfg, tgpsr_results** out) {
    if (cfg == nullptr || out == nullptr) return fail(TGPSR_E_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto res = std::make_unique<tgpsr_results>();
        res->runs = tgpsr::run_experiment(cfg->resolved);
        *out = res.release();
        return TGPSR_OK;
    });
}

void tgpsr_results_destroy(tgpsr_results* res) { delete res; }

size_t tgpsr_results_count(const tgpsr_results* res) { return res == nullptr ? 0 : res->runs.size(); }

tgpsr_status tgpsr_results_get(const tgpsr_results* res, size_t index, tgpsr_run_metrics* out) {
    if (res == nullptr || out == nullptr) return fail(TGPSR_E_INVALID_ARGUMENT, "null argument");
    if (index >= res->runs.size()) return fail(TGPSR_E_RANGE, "run index out of range");
    const auto& m = res->runs[index];
    *out = tgpsr_run_metrics{};
    out->scenario = m.scenario;
    out->seed = m.seed;
    out->fragments_sent = m.fragments_sent;
    out->fragments_delivered = m.fragments_delivered;
    out->avg_loss_ratio = m.avg_loss_ratio;
    out->images_attempted = m.images_attempted;
    out->images_received = m.images_received;
    out->complete = m.complete;
    out->usable = m.usable;
    out->unusable = m.unusable;
    out->no_reception = m.no_reception;
    out->has_latency = m.mean_latency_s.has_value() ? 1 : 0;
    out->mean_latency_s = m.mean_latency_s.value_or(0.0);
    out->latency_ratio = m.latency_ratio.value_or(0.0);
    return TGPSR_OK;
}

tgpsr_status tgpsr_results_export(const tgpsr_results* res, const char* format, const char* path) {
    if (res == nullptr || format == nullptr || path == nullptr) return fail(TGPSR_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        tgpsr::export_runs(res->runs, tgpsr::parse_format(format), path);
        return TGPSR_OK;
    });
}

tgpsr_status tgpsr_results_export_summary(const tgpsr_results* res, const char* path) {
    if (res == nullptr || path == nullptr) return fail(TGPSR_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        tgpsr::write_file(path, tgpsr::summary_csv(tgpsr::summarize(res->runs)));
        return TGPSR_OK;
    });
}

tgpsr_status tgpsr_results_format(const tgpsr_results* res, const char* format, char* buf, size_t cap,
                                  size_t* needed) {
    if (res == nullptr || format == nullptr) return fail(TGPSR_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto f = tgpsr::parse_format(format);
        return copy_out(f == tgpsr::ExportFormat::csv ? tgpsr::to_csv(res->runs) : tgpsr::to_structured(res->runs),
                        buf, cap, needed);
    });
}

} // extern "C"
