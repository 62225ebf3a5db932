#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "tgpsr/config.hpp"

namespace tgpsr {

/// Sensor placement. The robot sink is not part of it; it gets id
/// positions.size().
struct Deployment {
    std::vector<Position> positions;
    std::vector<double> line_of_sight;
    std::vector<double> residual_energy;

    std::size_t size() const { return positions.size(); }
};

/// Uniform positions, orientations and energies drawn from `rng`.
Deployment random_deployment(const ScenarioConfig& cfg, Rng& rng);

struct Detection {
    NodeId sentry = kNoNode;
    double time = 0.0;
    friend bool operator==(const Detection&, const Detection&) = default;
};

struct ActivationRecord {
    NodeId sentry = kNoNode;
    double time = 0.0;
    CoverSet chosen;
};

/// Hooks for fixtures: a fixed deployment and/or a fixed event schedule
/// (which skips sentry election, so nodes without cover sets may detect).
struct RunOptions {
    std::optional<Deployment> deployment;
    std::optional<std::vector<Detection>> detections;
};

struct DropCounters {
    std::uint64_t no_sink_position = 0;
    std::uint64_t routing_failure = 0;
    std::uint64_t mac_failure = 0;
    std::uint64_t queue_overflow = 0;
    std::uint64_t hop_limit = 0;
};

struct RunRecord {
    int scenario = 1;
    std::uint64_t seed = 0;
    double best_case_latency = 0.94;

    std::vector<ImageResult> images; // every captured image, by id
    std::uint64_t fragments_generated = 0;
    std::uint64_t fragments_delivered = 0; // distinct, on time
    std::uint64_t late_fragments = 0;
    std::uint64_t duplicate_fragments = 0;
    DropCounters drops;
    // per-hop forwarding decisions, indexed by ForwardingMode
    std::array<std::uint64_t, 3> mode_hops{};

    ChannelCounters channel;
    MacCounters mac; // summed over all radios
    EngineStats engine;
    double max_busy_fraction = 0.0;
    double end_time = 0.0;

    std::uint64_t topology_hash = 0;
    std::uint64_t discovery_hash = 0; // engine trace hash when discovery closes
    std::size_t eligible_sentries = 0;
    std::size_t disconnected_nodes = 0; // no multi-hop path to the sink at deployment
    std::uint64_t warnings = 0;
    std::vector<Detection> detections;
    std::vector<ActivationRecord> activations;
    std::map<NodeId, std::vector<CoverSet>> sentry_cover_sets;
};

/// One complete run: deployment, neighbor discovery, cover-set enumeration,
/// sink beaconing, detection events, image bursts and reassembly at the sink.
RunRecord simulate(const ScenarioConfig& cfg, const RunOptions& options = {});

} // namespace tgpsr
