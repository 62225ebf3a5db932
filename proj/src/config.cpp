#include "tgpsr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace tgpsr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
    throw Error(ErrorCode::parse, "invalid value '" + value + "' for key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "inf") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty()) bad(key, v, "expected a number");
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty()) bad(key, v, "expected a non-negative integer");
    return out;
}

double positive(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (!(d > 0.0)) bad(key, v, "must be positive");
    return d;
}

double non_negative(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (!(d >= 0.0)) bad(key, v, "must be non-negative");
    return d;
}

std::string fmt(double d) {
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, p);
}

template <typename T>
    requires std::is_integral_v<T>
std::string fmt(T u) {
    return std::to_string(u);
}

Position to_position(const std::string& key, const std::string& v) {
    const auto comma = v.find(',');
    if (comma == std::string::npos) bad(key, v, "expected x,y");
    return {to_double(key, v.substr(0, comma)), to_double(key, v.substr(comma + 1))};
}

struct Setting {
    std::string key;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

const std::vector<Setting>& registry() {
    static const std::vector<Setting> r = [] {
        std::vector<Setting> s;
        auto num = [&s](std::string key, auto member_ref, auto parser) {
            s.push_back({key,
                         [member_ref, parser, key](ScenarioConfig& c, const std::string& v) {
                             member_ref(c) = static_cast<std::remove_reference_t<decltype(member_ref(c))>>(parser(key, v));
                         },
                         [member_ref](const ScenarioConfig& c) {
                             return fmt(member_ref(const_cast<ScenarioConfig&>(c)));
                         }});
        };
        auto count = [&num](std::string key, auto member_ref) { num(std::move(key), member_ref, to_uint); };

        s.push_back({"scenario",
                     [](ScenarioConfig& c, const std::string& v) {
                         const auto n = to_uint("scenario", v);
                         if (n < 1 || n > 3) bad("scenario", v, "must be 1, 2 or 3");
                         c.scenario = static_cast<int>(n);
                     },
                     [](const ScenarioConfig& c) { return std::to_string(c.scenario); }});
        count("nodes", [](ScenarioConfig& c) -> std::size_t& { return c.node_count; });
        s.push_back({"area",
                     [](ScenarioConfig& c, const std::string& v) {
                         const auto x = v.find_first_of("xX*");
                         if (x == std::string::npos) {
                             c.area_width = c.area_height = positive("area", v);
                         } else {
                             c.area_width = positive("area", v.substr(0, x));
                             c.area_height = positive("area", v.substr(x + 1));
                         }
                     },
                     [](const ScenarioConfig& c) { return fmt(c.area_width) + "x" + fmt(c.area_height); }});
        num("range", [](ScenarioConfig& c) -> double& { return c.radio.range; }, positive);
        num("bitrate", [](ScenarioConfig& c) -> double& { return c.radio.bitrate; }, positive);
        count("frame-overhead", [](ScenarioConfig& c) -> std::size_t& { return c.radio.frame_overhead; });
        num("aov", [](ScenarioConfig& c) -> double& { return c.angle_of_view_deg; }, positive);
        num("dov", [](ScenarioConfig& c) -> double& { return c.depth_of_view; }, positive);
        count("raw-size", [](ScenarioConfig& c) -> std::size_t& { return c.image.raw_size; });
        count("encoded-size", [](ScenarioConfig& c) -> std::size_t& { return c.image.encoded_size; });
        count("payload", [](ScenarioConfig& c) -> std::size_t& { return c.image.payload_size; });
        s.push_back({"packets",
                     [](ScenarioConfig& c, const std::string& v) {
                         if (trim(v) == "auto") c.image.packet_count.reset();
                         else c.image.packet_count = to_uint("packets", v);
                     },
                     [](const ScenarioConfig& c) {
                         return c.image.packet_count ? fmt(std::uint64_t{*c.image.packet_count}) : std::string("auto");
                     }});
        num("quality-factor", [](ScenarioConfig& c) -> double& { return c.image.quality_factor; }, non_negative);
        num("capture-rate", [](ScenarioConfig& c) -> double& { return c.capture_rate; }, non_negative);
        count("images-per-burst", [](ScenarioConfig& c) -> std::size_t& { return c.images_per_burst; });
        num("alpha", [](ScenarioConfig& c) -> double& { return c.weights.alpha; }, non_negative);
        num("beta", [](ScenarioConfig& c) -> double& { return c.weights.beta; }, non_negative);
        num("path-factor", [](ScenarioConfig& c) -> double& { return c.path_factor; }, positive);
        num("energy-floor", [](ScenarioConfig& c) -> double& { return c.energy_floor; }, non_negative);
        num("energy-min", [](ScenarioConfig& c) -> double& { return c.energy_min; }, non_negative);
        num("energy-max", [](ScenarioConfig& c) -> double& { return c.energy_max; }, non_negative);
        count("seed", [](ScenarioConfig& c) -> std::uint64_t& { return c.seed; });
        count("runs", [](ScenarioConfig& c) -> std::size_t& { return c.runs; });
        num("sentry-fraction", [](ScenarioConfig& c) -> double& { return c.sentry_fraction; }, non_negative);
        num("event-start", [](ScenarioConfig& c) -> double& { return c.event_start; }, non_negative);
        num("event-window", [](ScenarioConfig& c) -> double& { return c.event_window; }, non_negative);
        num("drain-time", [](ScenarioConfig& c) -> double& { return c.drain_time; }, positive);
        num("cca", [](ScenarioConfig& c) -> double& { return c.mac.cca_duration; }, positive);
        num("backoff-slot", [](ScenarioConfig& c) -> double& { return c.mac.backoff_slot; }, positive);
        num("turnaround", [](ScenarioConfig& c) -> double& { return c.mac.turnaround; }, non_negative);
        num("ack-wait", [](ScenarioConfig& c) -> double& { return c.mac.ack_wait; }, positive);
        count("min-be", [](ScenarioConfig& c) -> unsigned& { return c.mac.min_backoff_exponent; });
        count("max-be", [](ScenarioConfig& c) -> unsigned& { return c.mac.max_backoff_exponent; });
        count("max-backoffs", [](ScenarioConfig& c) -> unsigned& { return c.mac.max_csma_backoffs; });
        count("max-retries", [](ScenarioConfig& c) -> unsigned& { return c.mac.max_retries; });
        count("queue-capacity", [](ScenarioConfig& c) -> std::size_t& { return c.mac.queue_capacity; });
        s.push_back({"backoff",
                     [](ScenarioConfig& c, const std::string& v) {
                         const auto t = trim(v);
                         if (t == "random") c.mac.backoff = BackoffPolicy::random;
                         else if (t == "min") c.mac.backoff = BackoffPolicy::min;
                         else if (t == "max") c.mac.backoff = BackoffPolicy::max;
                         else bad("backoff", v, "expected random, min or max");
                     },
                     [](const ScenarioConfig& c) -> std::string {
                         switch (c.mac.backoff) {
                         case BackoffPolicy::min: return "min";
                         case BackoffPolicy::max: return "max";
                         default: return "random";
                         }
                     }});
        num("display-timer", [](ScenarioConfig& c) -> double& { return c.display_timer; }, positive);
        num("beacon-period", [](ScenarioConfig& c) -> double& { return c.beacon_period; }, positive);
        num("beacon-start", [](ScenarioConfig& c) -> double& { return c.beacon_start; }, non_negative);
        num("beacon-jitter", [](ScenarioConfig& c) -> double& { return c.beacon_jitter; }, non_negative);
        s.push_back({"sink",
                     [](ScenarioConfig& c, const std::string& v) {
                         c.sink_waypoints.clear();
                         if (trim(v) == "center") return;
                         std::stringstream ss(v);
                         std::string item;
                         while (std::getline(ss, item, ';')) {
                             if (!trim(item).empty()) c.sink_waypoints.push_back(to_position("sink", item));
                         }
                     },
                     [](const ScenarioConfig& c) {
                         if (c.sink_waypoints.empty()) return std::string("center");
                         std::string out;
                         for (std::size_t i = 0; i < c.sink_waypoints.size(); ++i) {
                             if (i) out += ';';
                             out += fmt(c.sink_waypoints[i].x) + "," + fmt(c.sink_waypoints[i].y);
                         }
                         return out;
                     }});
        num("sink-speed", [](ScenarioConfig& c) -> double& { return c.sink_speed; }, positive);
        count("max-cardinality", [](ScenarioConfig& c) -> std::size_t& { return c.max_cardinality; });
        s.push_back({"coverage-spacing",
                     [](ScenarioConfig& c, const std::string& v) {
                         c.coverage_spacing = trim(v) == "corners" ? std::numeric_limits<double>::infinity()
                                                                   : positive("coverage-spacing", v);
                     },
                     [](const ScenarioConfig& c) {
                         return std::isinf(c.coverage_spacing) ? std::string("corners") : fmt(c.coverage_spacing);
                     }});
        num("info-timeout", [](ScenarioConfig& c) -> double& { return c.info_timeout; }, positive);
        count("source-window", [](ScenarioConfig& c) -> std::size_t& { return c.source_window; });
        num("hello-jitter", [](ScenarioConfig& c) -> double& { return c.discovery.hello_jitter; }, non_negative);
        num("table-start", [](ScenarioConfig& c) -> double& { return c.discovery.table_round_start; }, non_negative);
        num("table-jitter", [](ScenarioConfig& c) -> double& { return c.discovery.table_jitter; }, non_negative);
        count("hop-limit", [](ScenarioConfig& c) -> std::uint32_t& { return c.hop_limit; });
        num("best-case-latency", [](ScenarioConfig& c) -> double& { return c.best_case_latency; }, positive);
        return s;
    }();
    return r;
}

const Setting* find_setting(const std::string& key) {
    for (const auto& s : registry()) {
        if (s.key == key) return &s;
    }
    return nullptr;
}

} // namespace

double ScenarioConfig::angle_of_view() const { return angle_of_view_deg * std::numbers::pi / 180.0; }

Position ScenarioConfig::sink_start() const {
    if (sink_waypoints.empty()) return {area_width / 2.0, area_height / 2.0};
    return sink_waypoints.front();
}

void ScenarioConfig::validate() const {
    if (scenario < 1 || scenario > 3) throw Error(ErrorCode::invalid_argument, "scenario must be 1, 2 or 3");
    if (!(area_width > 0.0) || !(area_height > 0.0)) throw Error(ErrorCode::invalid_argument, "area must be positive");
    if (!(angle_of_view_deg > 0.0 && angle_of_view_deg < 180.0))
        throw Error(ErrorCode::invalid_argument, "angle of view must lie in (0, 180) degrees");
    if (runs == 0) throw Error(ErrorCode::invalid_argument, "runs must be at least 1");
    if (images_per_burst == 0) throw Error(ErrorCode::invalid_argument, "images per burst must be at least 1");
    if (max_cardinality == 0) throw Error(ErrorCode::invalid_argument, "max cardinality must be at least 1");
    if (source_window == 0) throw Error(ErrorCode::invalid_argument, "source window must be at least 1");
    if (energy_max < energy_min) throw Error(ErrorCode::invalid_argument, "energy-max below energy-min");
    if (sentry_fraction > 1.0) throw Error(ErrorCode::invalid_argument, "sentry fraction above 1");
    radio.validate();
    mac.validate();
    weights.validate();
    image.validate();
    PathRequirement{capture_rate, path_factor}.validate();
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& s : registry()) out.push_back(s.key);
    return out;
}

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const Setting* s = find_setting(key);
    if (s == nullptr) throw Error(ErrorCode::parse, "unknown key '" + key + "'");
    s->set(cfg, value);
}

ScenarioConfig parse_config(const std::string& text, const Overrides& overrides) {
    ScenarioConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        try {
            apply_setting(cfg, key, trim(line.substr(eq + 1)));
        } catch (const Error& e) {
            throw Error(ErrorCode::parse, "line " + std::to_string(lineno) + ": " + e.what());
        }
        seen.insert(key);
    }
    for (const auto& [key, value] : overrides) {
        apply_setting(cfg, key, value);
        seen.insert(key);
    }
    // A lone weight implies its complement.
    if (seen.contains("alpha") && !seen.contains("beta")) cfg.weights.beta = 1.0 - cfg.weights.alpha;
    if (seen.contains("beta") && !seen.contains("alpha")) cfg.weights.alpha = 1.0 - cfg.weights.beta;
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::parse, e.what());
    }
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path, const Overrides& overrides) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::io, "cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string describe(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& s : registry()) out += s.key + " = " + s.get(cfg) + "\n";
    out += "# routing = " + std::string(to_string(cfg.routing())) + " (derived from scenario)\n";
    return out;
}

} // namespace tgpsr
