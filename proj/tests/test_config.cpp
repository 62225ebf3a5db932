#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tgpsr/config.hpp"

using namespace tgpsr;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::internal;
}

std::string message_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("empty config yields the reference defaults") {
    const auto c = parse_config("");
    CHECK(c.scenario == 1);
    CHECK(c.node_count == 400);
    CHECK(c.area_width == 2000);
    CHECK(c.area_height == 2000);
    CHECK(c.radio.range == 150);
    CHECK(c.radio.bitrate == 250000);
    CHECK(c.angle_of_view() == doctest::Approx(std::numbers::pi / 3));
    CHECK(c.depth_of_view == 125);
    CHECK(c.image.fragment_count() == 205);
    CHECK(c.image.encoded_size == 16621);
    CHECK(c.image.raw_size == 102400);
    CHECK(c.image.payload_size == 90);
    CHECK(c.display_timer == 10);
    CHECK(c.best_case_latency == 0.94);
    CHECK(c.weights.alpha == 0.5);
    CHECK(c.weights.beta == 0.5);
    CHECK(c.info_timeout == 2.0);
    CHECK(c.mac.queue_capacity == 64);
    CHECK(c.routing() == Protocol::gpsr);
    CHECK(c.sink_start() == Position{1000, 1000});
}

TEST_CASE("keys, comments, whitespace and overrides") {
    const auto c = parse_config("# a comment\n  nodes = 50   # trailing\n\nscenario=3\narea = 800x600\n",
                                {{"nodes", "60"}, {"sink", "10,20;30,40"}});
    CHECK(c.node_count == 60);
    CHECK(c.scenario == 3);
    CHECK(c.routing() == Protocol::tgpsr);
    CHECK(c.area_width == 800);
    CHECK(c.area_height == 600);
    REQUIRE(c.sink_waypoints.size() == 2);
    CHECK(c.sink_waypoints[1] == Position{30, 40});
    CHECK(parse_config("area = 500").area_height == 500);
    CHECK_FALSE(parse_config("packets = auto").image.packet_count);
    CHECK(std::isinf(parse_config("coverage-spacing = corners").coverage_spacing));
    CHECK(parse_config("coverage-spacing = 5").coverage_spacing == 5);
}

TEST_CASE("a lone weight implies its complement") {
    const auto a = parse_config("alpha = 0.8");
    CHECK(a.weights.beta == doctest::Approx(0.2));
    const auto b = parse_config("", {{"beta", "0.25"}});
    CHECK(b.weights.alpha == doctest::Approx(0.75));
    CHECK(code_of([] { parse_config("alpha = 0.8\nbeta = 0.8"); }) == ErrorCode::parse);
}

TEST_CASE("bad input is a parse error naming the key and line") {
    CHECK(code_of([] { parse_config("scenario = 4"); }) == ErrorCode::parse);
    CHECK(message_of([] { parse_config("scenario = 4"); }).find("scenario") != std::string::npos);
    CHECK(message_of([] { parse_config("\n\nnodes = many"); }).find("line 3") != std::string::npos);
    CHECK(message_of([] { parse_config("\n\nnodes = many"); }).find("nodes") != std::string::npos);
    CHECK(message_of([] { parse_config("colour = blue"); }).find("colour") != std::string::npos);
    CHECK(code_of([] { parse_config("just words"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_config("range = -5"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_config("aov = 180"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_config("runs = 0"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_config("backoff = sometimes"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_config("sentry-fraction = 1.5"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_config("", {{"nodes", "x"}}); }) == ErrorCode::parse);
}

TEST_CASE("describe round-trips") {
    const auto c = parse_config("scenario = 2\nnodes = 123\narea = 700x900\nalpha = 0.3\nsink = 1.5,2.25;100,0\n"
                                "backoff = max\npackets = auto\ncoverage-spacing = 2.5\nrange = 149.999\n");
    const auto text = describe(c);
    CHECK(text.find("# routing = gpsr") != std::string::npos);
    CHECK(describe(parse_config(text)) == text);
    CHECK(describe(parse_config(describe(ScenarioConfig{}))) == describe(ScenarioConfig{}));
    for (const auto& k : config_keys()) CHECK(text.find(k + " = ") != std::string::npos);
}

TEST_CASE("config files") {
    const auto dir = std::filesystem::temp_directory_path() / "tgpsr_config_test";
    std::filesystem::create_directories(dir);
    const auto p = dir / "run.conf";
    std::ofstream(p) << "nodes = 42\nseed = 9\n";
    const auto c = load_config_file(p.string(), {{"seed", "10"}});
    CHECK(c.node_count == 42);
    CHECK(c.seed == 10);
    CHECK(code_of([&] { load_config_file((dir / "missing.conf").string()); }) == ErrorCode::io);
}
