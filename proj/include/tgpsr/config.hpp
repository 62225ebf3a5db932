#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tgpsr/imaging.hpp"
#include "tgpsr/neighborhood.hpp"
#include "tgpsr/netsim.hpp"
#include "tgpsr/routing.hpp"
#include "tgpsr/selection.hpp"

namespace tgpsr {

/// Everything that determines a run. Defaults reproduce the reference
/// deployment: 400 cameras over 2 km x 2 km, 150 m radio at 250 kbps,
/// 60 degree / 125 m fields of view, 205-fragment images, 10 s display timer.
struct ScenarioConfig {
    int scenario = 1;
    std::size_t node_count = 400;
    double area_width = 2000.0;
    double area_height = 2000.0;
    RadioModel radio;
    double angle_of_view_deg = 60.0;
    double depth_of_view = 125.0;
    ImageSpec image;

    double capture_rate = 1.0;
    std::size_t images_per_burst = 1;
    SelectionWeights weights;
    double path_factor = 1.0;
    double energy_floor = 0.0;
    double energy_min = 50.0;
    double energy_max = 100.0;

    std::uint64_t seed = 1;
    std::size_t runs = 1;

    double sentry_fraction = 0.10;
    double event_start = 10.0;
    double event_window = 60.0;
    double drain_time = 60.0;

    MacConfig mac;
    double display_timer = kDefaultDisplayTimer;
    double beacon_period = 5.0;
    double beacon_start = 4.0;
    double beacon_jitter = 0.05;
    std::vector<Position> sink_waypoints; // empty: static at the area center
    double sink_speed = 1.0;

    std::size_t max_cardinality = 4;
    // Infinite spacing samples only the FoV vertices and centroid.
    double coverage_spacing = std::numeric_limits<double>::infinity();
    double info_timeout = 2.0;
    std::size_t source_window = 4;
    DiscoveryTiming discovery;
    std::uint32_t hop_limit = 255;
    double best_case_latency = 0.94;

    Protocol routing() const { return scenario == 3 ? Protocol::tgpsr : Protocol::gpsr; }
    double angle_of_view() const;
    Position sink_start() const;
    void validate() const;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Keys accepted in config files and as overrides, in display order.
std::vector<std::string> config_keys();

/// Sets one key. Throws Error(parse) naming the key on a malformed value or
/// an unknown key.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Parses flat `key = value` text ('#' starts a comment), then applies the
/// overrides. Errors name the key and line.
ScenarioConfig parse_config(const std::string& text, const Overrides& overrides = {});
ScenarioConfig load_config_file(const std::string& path, const Overrides& overrides = {});

/// Resolved configuration as `key = value` lines, parseable by parse_config.
std::string describe(const ScenarioConfig& cfg);

} // namespace tgpsr
