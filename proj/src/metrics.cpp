#include "tgpsr/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace tgpsr {

namespace {

std::string num(double d) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, p);
}

std::string opt(const std::optional<double>& d) { return d ? num(*d) : std::string(); }

double parse_double(const std::string& s, std::size_t line) {
    double d = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": bad number '" + s + "'");
    return d;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line) {
    std::uint64_t u = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), u);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": bad count '" + s + "'");
    return u;
}

} // namespace

const char* const kCsvHeader = "scenario,seed,fragments_sent,fragments_delivered,avg_loss_ratio,images_attempted,"
                               "images_received,complete,usable,unusable,mean_latency_s,latency_ratio";

void RunMetrics::check() const {
    if (complete + usable + unusable != images_received || images_received > images_attempted ||
        images_received + no_reception != images_attempted || latencies.size() != images_received ||
        fragments_delivered > fragments_sent || !(avg_loss_ratio >= 0.0 && avg_loss_ratio <= 1.0))
        throw Error(ErrorCode::internal, "inconsistent run metrics for seed " + std::to_string(seed));
}

RunMetrics aggregate(int scenario, std::uint64_t seed, const std::vector<ImageResult>& images,
                     std::uint64_t fragments_sent, std::uint64_t fragments_delivered, double best_case_latency) {
    RunMetrics m;
    m.scenario = scenario;
    m.seed = seed;
    m.fragments_sent = fragments_sent;
    m.fragments_delivered = fragments_delivered;
    m.images_attempted = images.size();
    double loss_sum = 0.0;
    for (const auto& img : images) {
        loss_sum += img.loss_ratio;
        if (!img.received_any) {
            ++m.no_reception;
            continue;
        }
        ++m.images_received;
        m.latencies.push_back(img.latency);
        switch (classify(img.loss_ratio)) {
        case ImageQuality::complete: ++m.complete; break;
        case ImageQuality::usable: ++m.usable; break;
        case ImageQuality::unusable: ++m.unusable; break;
        }
    }
    m.avg_loss_ratio = images.empty() ? 1.0 : loss_sum / static_cast<double>(images.size());
    if (!m.latencies.empty()) {
        double s = 0.0;
        for (double l : m.latencies) s += l;
        m.mean_latency_s = s / static_cast<double>(m.latencies.size());
        m.latency_ratio = *m.mean_latency_s / best_case_latency;
    }
    return m;
}

RunMetrics aggregate(const RunRecord& r) {
    return aggregate(r.scenario, r.seed, r.images, r.fragments_generated, r.fragments_delivered,
                     r.best_case_latency);
}

ExportFormat parse_format(const std::string& name) {
    if (name == "csv") return ExportFormat::csv;
    if (name == "structured" || name == "json") return ExportFormat::structured;
    throw Error(ErrorCode::invalid_argument, "unknown export format '" + name + "'");
}

std::string to_csv(const std::vector<RunMetrics>& runs) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& m : runs) {
        out += std::to_string(m.scenario) + "," + std::to_string(m.seed) + "," + std::to_string(m.fragments_sent) +
               "," + std::to_string(m.fragments_delivered) + "," + num(m.avg_loss_ratio) + "," +
               std::to_string(m.images_attempted) + "," + std::to_string(m.images_received) + "," +
               std::to_string(m.complete) + "," + std::to_string(m.usable) + "," + std::to_string(m.unusable) + "," +
               opt(m.mean_latency_s) + "," + opt(m.latency_ratio) + "\n";
    }
    return out;
}

std::vector<RunMetrics> from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || line != kCsvHeader) throw Error(ErrorCode::parse, "line 1: unexpected CSV header");
    std::vector<RunMetrics> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 12) throw Error(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected 12 fields");
        RunMetrics m;
        m.scenario = static_cast<int>(parse_uint(f[0], lineno));
        m.seed = parse_uint(f[1], lineno);
        m.fragments_sent = parse_uint(f[2], lineno);
        m.fragments_delivered = parse_uint(f[3], lineno);
        m.avg_loss_ratio = parse_double(f[4], lineno);
        m.images_attempted = parse_uint(f[5], lineno);
        m.images_received = parse_uint(f[6], lineno);
        m.complete = parse_uint(f[7], lineno);
        m.usable = parse_uint(f[8], lineno);
        m.unusable = parse_uint(f[9], lineno);
        m.no_reception = m.images_attempted - std::min(m.images_attempted, m.images_received);
        if (!f[10].empty()) m.mean_latency_s = parse_double(f[10], lineno);
        if (!f[11].empty()) m.latency_ratio = parse_double(f[11], lineno);
        out.push_back(std::move(m));
    }
    return out;
}

std::string to_structured(const std::vector<RunMetrics>& runs) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& m : runs) {
        nlohmann::ordered_json j;
        j["scenario"] = m.scenario;
        j["seed"] = m.seed;
        j["fragments"] = {{"sent", m.fragments_sent}, {"delivered", m.fragments_delivered}};
        j["avg_loss_ratio"] = m.avg_loss_ratio;
        j["images"] = {{"attempted", m.images_attempted}, {"received", m.images_received},
                       {"complete", m.complete},          {"usable", m.usable},
                       {"unusable", m.unusable},          {"no_reception", m.no_reception}};
        j["latency"] = {{"samples_s", m.latencies},
                        {"mean_s", m.mean_latency_s ? nlohmann::ordered_json(*m.mean_latency_s) : nullptr},
                        {"ratio", m.latency_ratio ? nlohmann::ordered_json(*m.latency_ratio) : nullptr}};
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json root;
    root["runs"] = std::move(arr);
    return root.dump(2) + "\n";
}

std::vector<RunMetrics> from_structured(const std::string& text) {
    std::vector<RunMetrics> out;
    try {
        const auto root = nlohmann::json::parse(text);
        for (const auto& j : root.at("runs")) {
            RunMetrics m;
            m.scenario = j.at("scenario").get<int>();
            m.seed = j.at("seed").get<std::uint64_t>();
            m.fragments_sent = j.at("fragments").at("sent").get<std::uint64_t>();
            m.fragments_delivered = j.at("fragments").at("delivered").get<std::uint64_t>();
            m.avg_loss_ratio = j.at("avg_loss_ratio").get<double>();
            const auto& im = j.at("images");
            m.images_attempted = im.at("attempted").get<std::uint64_t>();
            m.images_received = im.at("received").get<std::uint64_t>();
            m.complete = im.at("complete").get<std::uint64_t>();
            m.usable = im.at("usable").get<std::uint64_t>();
            m.unusable = im.at("unusable").get<std::uint64_t>();
            m.no_reception = im.at("no_reception").get<std::uint64_t>();
            const auto& lat = j.at("latency");
            m.latencies = lat.at("samples_s").get<std::vector<double>>();
            if (!lat.at("mean_s").is_null()) m.mean_latency_s = lat.at("mean_s").get<double>();
            if (!lat.at("ratio").is_null()) m.latency_ratio = lat.at("ratio").get<double>();
            out.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse, std::string("structured results: ") + e.what());
    }
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunMetrics>& runs) {
    using Getter = std::optional<double> (*)(const RunMetrics&);
    static const std::vector<std::pair<const char*, Getter>> columns = {
        {"fragments_sent", [](const RunMetrics& m) -> std::optional<double> { return double(m.fragments_sent); }},
        {"fragments_delivered",
         [](const RunMetrics& m) -> std::optional<double> { return double(m.fragments_delivered); }},
        {"avg_loss_ratio", [](const RunMetrics& m) -> std::optional<double> { return m.avg_loss_ratio; }},
        {"images_attempted", [](const RunMetrics& m) -> std::optional<double> { return double(m.images_attempted); }},
        {"images_received", [](const RunMetrics& m) -> std::optional<double> { return double(m.images_received); }},
        {"complete", [](const RunMetrics& m) -> std::optional<double> { return double(m.complete); }},
        {"usable", [](const RunMetrics& m) -> std::optional<double> { return double(m.usable); }},
        {"unusable", [](const RunMetrics& m) -> std::optional<double> { return double(m.unusable); }},
        {"mean_latency_s", [](const RunMetrics& m) { return m.mean_latency_s; }},
        {"latency_ratio", [](const RunMetrics& m) { return m.latency_ratio; }},
    };
    std::map<int, std::vector<const RunMetrics*>> by_scenario;
    for (const auto& m : runs) by_scenario[m.scenario].push_back(&m);

    std::vector<SummaryRow> out;
    for (const auto& [scenario, ms] : by_scenario) {
        for (const auto& [name, get] : columns) {
            std::vector<double> xs;
            for (const auto* m : ms) {
                if (auto v = get(*m)) xs.push_back(*v);
            }
            SummaryRow row{scenario, name, xs.size(), 0.0, 0.0};
            if (!xs.empty()) {
                double s = 0.0;
                for (double x : xs) s += x;
                row.mean = s / static_cast<double>(xs.size());
                if (xs.size() > 1) {
                    double ss = 0.0;
                    for (double x : xs) ss += (x - row.mean) * (x - row.mean);
                    row.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
                }
            }
            out.push_back(std::move(row));
        }
    }
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "scenario,metric,runs,mean,stddev\n";
    for (const auto& r : rows) {
        out += std::to_string(r.scenario) + "," + r.metric + "," + std::to_string(r.runs) + "," + num(r.mean) + "," +
               num(r.stddev) + "\n";
    }
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
    f << text;
    f.flush();
    if (!f) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

void export_runs(const std::vector<RunMetrics>& runs, ExportFormat format, const std::string& path) {
    if (runs.empty()) throw Error(ErrorCode::invalid_argument, "nothing to export");
    write_file(path, format == ExportFormat::csv ? to_csv(runs) : to_structured(runs));
}

} // namespace tgpsr
