#pragma once

#include <map>
#include <vector>

#include "tgpsr/geometry.hpp"
#include "tgpsr/types.hpp"

namespace tgpsr {

/// What a node advertises about itself during neighbor discovery.
struct NeighborRecord {
    NodeId id = kNoNode;
    Position position;
    double line_of_sight = 0.0;
    double angle_of_view = std::numbers::pi / 3.0;
    double depth_of_view = 125.0;
    double residual_energy = 0.0;

    FieldOfView fov() const { return {position, line_of_sight, angle_of_view, depth_of_view}; }
    friend bool operator==(const NeighborRecord&, const NeighborRecord&) = default;
};

/// 1-hop records plus, per 1-hop neighbor, that neighbor's own 1-hop table.
/// The owner never appears in either level.
class NeighborTable {
public:
    using RecordMap = std::map<NodeId, NeighborRecord>;

    explicit NeighborTable(NodeId owner = kNoNode) : owner_(owner) {}

    NodeId owner() const { return owner_; }

    void add_one_hop(const NeighborRecord& rec);
    /// Records the table advertised by `via`. Ignored unless `via` is a known
    /// 1-hop neighbor.
    void set_two_hop(NodeId via, const std::vector<NeighborRecord>& records);

    const RecordMap& one_hop() const { return one_hop_; }
    const std::map<NodeId, RecordMap>& two_hop() const { return two_hop_; }

    bool has_one_hop(NodeId id) const { return one_hop_.contains(id); }
    const NeighborRecord* find(NodeId id) const;
    std::vector<NeighborRecord> one_hop_records() const;

    /// Bumped on every mutation; lets consumers cache derived sets.
    std::uint64_t version() const { return version_; }

private:
    NodeId owner_;
    RecordMap one_hop_;
    std::map<NodeId, RecordMap> two_hop_;
    std::uint64_t version_ = 0;
};

/// F(v): 1-hop neighbors strictly closer to the sink than v. Sorted ids.
std::vector<NodeId> forwarders(const NeighborTable& table, Position self_pos, Position sink_pos);

/// F2(v,u): neighbors of u strictly closer to the sink than u. Never contains v.
/// Throws Error(precondition) when u is not in F(v).
std::vector<NodeId> forwarders2(const NeighborTable& table, Position self_pos, NodeId u, Position sink_pos);

/// F2(v): union of F2(v,u) over u in F(v), deduplicated.
std::vector<NodeId> forwarders2_union(const NeighborTable& table, Position self_pos, Position sink_pos);

// Two-round discovery: HELLO with the node's own record, then a TABLE
// broadcast of everything heard in round one.

struct DiscoveryTiming {
    double hello_jitter = 1.0;
    double table_round_start = 2.0;
    double table_jitter = 1.0;

    double completion_time() const { return table_round_start + table_jitter + 0.5; }
};

enum class DiscoveryRound { hello, table };

struct ScheduledBroadcast {
    double time = 0.0;
    DiscoveryRound round = DiscoveryRound::hello;
};

std::vector<ScheduledBroadcast> run_discovery(double now, const DiscoveryTiming& timing, Rng& rng);

} // namespace tgpsr
