#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tgpsr/neighborhood.hpp"
#include "tgpsr/types.hpp"

namespace tgpsr {

enum class Protocol { gpsr, tgpsr };

enum class ForwardingMode { two_hop_greedy, greedy, perimeter };

const char* to_string(ForwardingMode m);
const char* to_string(Protocol p);

struct TempDestination {
    NodeId id = kNoNode;
    Position position;
    friend bool operator==(const TempDestination&, const TempDestination&) = default;
};

struct PerimeterState {
    Position entry_point; // where perimeter mode began (Lp)
    Position face_point;  // where the current face was entered (Lf)
    std::optional<std::pair<NodeId, NodeId>> first_edge;
    friend bool operator==(const PerimeterState&, const PerimeterState&) = default;
};

struct RoutingHeader {
    Position final_dest;
    ForwardingMode mode = ForwardingMode::greedy;
    std::optional<TempDestination> temp_dest;
    std::optional<NodeId> relay;
    std::optional<PerimeterState> perimeter;
    std::uint32_t n_paths = 1; // NbOptimalPaths of the originating source
    std::uint32_t hops = 0;
    friend bool operator==(const RoutingHeader&, const RoutingHeader&) = default;
};

/// Positions of the neighbors a node can route through.
using NeighborPositions = std::map<NodeId, Position>;

struct PlanarNeighborSet {
    NodeId owner = kNoNode;
    std::vector<NodeId> planar_neighbors; // sorted
};

/// Gabriel graph restricted to the owner's edges: (owner,u) survives unless
/// some other neighbor w has d2(owner,w) + d2(u,w) < d2(owner,u).
PlanarNeighborSet gabriel_planarize(NodeId owner, Position owner_pos, const NeighborPositions& one_hop);

/// Neighbor closest to dest, if strictly closer than self. Ties: lowest id.
std::optional<NodeId> greedy_next_hop(Position self_pos, const NeighborPositions& one_hop, Position dest);

struct PerimeterStep {
    enum class Kind { forward, recovered, loop, no_neighbor } kind = Kind::forward;
    NodeId next_hop = kNoNode;
};

/// One right-hand-rule step on the planar graph. `header.perimeter` must be
/// set. `arrived_from` is kNoNode when perimeter mode starts at this node.
/// Returns `recovered` without touching the header when self is closer to the
/// destination than the entry point.
PerimeterStep perimeter_next_hop(NodeId self, Position self_pos, const PlanarNeighborSet& planar,
                                 const NeighborPositions& positions, RoutingHeader& header, NodeId arrived_from);

struct PathPair {
    NodeId relay = kNoNode;
    NodeId temp_dest = kNoNode;
    friend bool operator==(const PathPair&, const PathPair&) = default;
};

/// 2-hop potential forwarders ranked by distance to dest; each paired with a
/// relay in F(v) that reaches it, unused relays preferred.
std::vector<PathPair> tgpsr_select_paths(const NeighborTable& table, Position self_pos, Position final_dest,
                                         std::size_t n_paths);

enum class DropCause { none, routing_failure, mac_failure, queue_overflow, hop_limit };
const char* to_string(DropCause c);

struct ForwardAction {
    enum class Kind { transmit, deliver, drop } kind = Kind::drop;
    NodeId next_hop = kNoNode;
    DropCause cause = DropCause::none;
};

/// Per-node routing state: neighbor table view, cached sink knowledge,
/// planarization cache and the multi-path round-robin cursor.
class Router {
public:
    Router(NodeId self, Position self_pos, Protocol protocol, NodeId sink_id, const NeighborTable* table,
           std::uint32_t hop_limit = 255);

    NodeId self() const { return self_; }
    Position position() const { return pos_; }
    Protocol protocol() const { return protocol_; }

    /// Latest known sink position, and whether the sink was heard directly.
    void set_sink(Position pos, bool one_hop);
    std::optional<Position> sink_position() const { return sink_pos_; }
    bool sink_is_neighbor() const { return sink_one_hop_; }

    /// Header a locally generated packet starts with.
    RoutingHeader make_header(std::uint32_t n_paths) const;

    /// Decides what to do with `header` at this node; mutates the header the
    /// way the chosen mode requires. `arrived_from` is the previous MAC hop
    /// (kNoNode for locally generated packets).
    ForwardAction forward(RoutingHeader& header, NodeId arrived_from);

    const PlanarNeighborSet& planar();
    const NeighborPositions& routing_neighbors();

private:
    ForwardAction greedy_family(RoutingHeader& header);
    ForwardAction enter_perimeter(RoutingHeader& header);
    void refresh();

    NodeId self_;
    Position pos_;
    Protocol protocol_;
    NodeId sink_id_;
    const NeighborTable* table_;
    std::uint32_t hop_limit_;

    std::optional<Position> sink_pos_;
    bool sink_one_hop_ = false;

    std::uint64_t cached_version_ = ~std::uint64_t{0};
    std::optional<Position> cached_sink_;
    bool cached_sink_one_hop_ = false;
    NeighborPositions neighbors_;
    PlanarNeighborSet planar_;
    std::uint64_t round_robin_ = 0;
};

} // namespace tgpsr
