#include "tgpsr/routing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace tgpsr {

const char* to_string(ForwardingMode m) {
    switch (m) {
    case ForwardingMode::two_hop_greedy: return "two_hop_greedy";
    case ForwardingMode::greedy: return "greedy";
    case ForwardingMode::perimeter: return "perimeter";
    }
    return "?";
}

const char* to_string(Protocol p) { return p == Protocol::gpsr ? "gpsr" : "tgpsr"; }

const char* to_string(DropCause c) {
    switch (c) {
    case DropCause::none: return "none";
    case DropCause::routing_failure: return "routing_failure";
    case DropCause::mac_failure: return "mac_failure";
    case DropCause::queue_overflow: return "queue_overflow";
    case DropCause::hop_limit: return "hop_limit";
    }
    return "?";
}

PlanarNeighborSet gabriel_planarize(NodeId owner, Position owner_pos, const NeighborPositions& one_hop) {
    PlanarNeighborSet out{owner, {}};
    for (const auto& [u, upos] : one_hop) {
        if (u == owner) continue;
        const double duv = distance_sq(owner_pos, upos);
        bool keep = true;
        for (const auto& [w, wpos] : one_hop) {
            if (w == u || w == owner) continue;
            if (distance_sq(owner_pos, wpos) + distance_sq(upos, wpos) < duv) {
                keep = false;
                break;
            }
        }
        if (keep) out.planar_neighbors.push_back(u);
    }
    return out;
}

std::optional<NodeId> greedy_next_hop(Position self_pos, const NeighborPositions& one_hop, Position dest) {
    double best = distance(self_pos, dest);
    std::optional<NodeId> pick;
    for (const auto& [id, pos] : one_hop) {
        const double d = distance(pos, dest);
        // map iteration is by ascending id, so strict < keeps the lowest id on ties
        if (d < best) {
            best = d;
            pick = id;
        }
    }
    return pick;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double bearing(Position from, Position to) { return std::atan2(to.y - from.y, to.x - from.x); }

// First planar neighbor counterclockwise from `start_angle`; `start_node`
// is only picked when it is the sole neighbor.
NodeId ccw_next(Position self_pos, const PlanarNeighborSet& planar, const NeighborPositions& positions,
                double start_angle, NodeId start_node) {
    NodeId best = kNoNode;
    double best_diff = kTwoPi + 1.0;
    for (NodeId n : planar.planar_neighbors) {
        auto it = positions.find(n);
        if (it == positions.end()) continue;
        double diff = kTwoPi;
        if (n != start_node) {
            diff = bearing(self_pos, it->second) - start_angle;
            while (diff < 0.0) diff += kTwoPi;
            while (diff >= kTwoPi) diff -= kTwoPi;
        }
        if (diff < best_diff) {
            best_diff = diff;
            best = n;
        }
    }
    return best;
}

double cross2(Position a, Position b) { return a.x * b.y - a.y * b.x; }

std::optional<Position> segment_intersection(Position p1, Position p2, Position q1, Position q2) {
    const Position r = p2 - p1;
    const Position s = q2 - q1;
    const double denom = cross2(r, s);
    if (std::abs(denom) < 1e-12) return std::nullopt;
    const Position qp = q1 - p1;
    const double t = cross2(qp, s) / denom;
    const double u = cross2(qp, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return p1 + t * r;
}

} // namespace

PerimeterStep perimeter_next_hop(NodeId self, Position self_pos, const PlanarNeighborSet& planar,
                                 const NeighborPositions& positions, RoutingHeader& header, NodeId arrived_from) {
    if (!header.perimeter) throw Error(ErrorCode::precondition, "perimeter step without perimeter state");
    PerimeterState& ps = *header.perimeter;
    const Position dest = header.final_dest;
    if (distance(self_pos, dest) < distance(ps.entry_point, dest)) return {PerimeterStep::Kind::recovered, kNoNode};
    if (planar.planar_neighbors.empty()) return {PerimeterStep::Kind::no_neighbor, kNoNode};

    NodeId next = kNoNode;
    auto from = positions.find(arrived_from);
    if (arrived_from != kNoNode && from != positions.end()) {
        next = ccw_next(self_pos, planar, positions, bearing(self_pos, from->second), arrived_from);
    } else {
        next = ccw_next(self_pos, planar, positions, bearing(self_pos, dest), kNoNode);
    }
    if (next == kNoNode) return {PerimeterStep::Kind::no_neighbor, kNoNode};

    // Face change: the chosen edge crosses the Lp-D line closer to D than Lf.
    bool face_changed = false;
    for (std::size_t guard = 0; guard <= planar.planar_neighbors.size(); ++guard) {
        const Position npos = positions.at(next);
        auto cut = segment_intersection(self_pos, npos, ps.entry_point, dest);
        if (!cut || !(distance(*cut, dest) < distance(ps.face_point, dest) - 1e-9)) break;
        ps.face_point = *cut;
        face_changed = true;
        next = ccw_next(self_pos, planar, positions, bearing(self_pos, npos), next);
    }

    const std::pair<NodeId, NodeId> edge{self, next};
    if (!face_changed && ps.first_edge && *ps.first_edge == edge) return {PerimeterStep::Kind::loop, kNoNode};
    if (face_changed || !ps.first_edge) ps.first_edge = edge;
    return {PerimeterStep::Kind::forward, next};
}

std::vector<PathPair> tgpsr_select_paths(const NeighborTable& table, Position self_pos, Position final_dest,
                                         std::size_t n_paths) {
    std::vector<PathPair> out;
    if (n_paths == 0) return out;
    // temp_dest -> relays that reach it
    std::map<NodeId, std::vector<NodeId>> relays_of;
    std::map<NodeId, Position> where;
    const auto fwd = forwarders(table, self_pos, final_dest);
    for (NodeId u : fwd) {
        for (NodeId k : forwarders2(table, self_pos, u, final_dest)) {
            relays_of[k].push_back(u);
            where[k] = table.two_hop().at(u).at(k).position;
        }
    }
    if (relays_of.empty()) return out;

    std::vector<NodeId> ranked;
    for (const auto& [k, rs] : relays_of) ranked.push_back(k);
    std::stable_sort(ranked.begin(), ranked.end(), [&](NodeId a, NodeId b) {
        const double da = distance(where[a], final_dest);
        const double db = distance(where[b], final_dest);
        if (da != db) return da < db;
        return a < b;
    });

    auto relay_rank = [&](NodeId a, NodeId b) {
        const double da = distance(table.find(a)->position, final_dest);
        const double db = distance(table.find(b)->position, final_dest);
        if (da != db) return da < db;
        return a < b;
    };

    std::set<NodeId> used;
    for (NodeId k : ranked) {
        if (out.size() >= n_paths) break;
        auto rs = relays_of[k];
        std::stable_sort(rs.begin(), rs.end(), relay_rank);
        NodeId pick = rs.front();
        for (NodeId u : rs) {
            if (!used.contains(u)) {
                pick = u;
                break;
            }
        }
        used.insert(pick);
        out.push_back({pick, k});
    }
    return out;
}

Router::Router(NodeId self, Position self_pos, Protocol protocol, NodeId sink_id, const NeighborTable* table,
               std::uint32_t hop_limit)
    : self_(self), pos_(self_pos), protocol_(protocol), sink_id_(sink_id), table_(table), hop_limit_(hop_limit) {}

void Router::set_sink(Position pos, bool one_hop) {
    sink_pos_ = pos;
    sink_one_hop_ = one_hop;
}

RoutingHeader Router::make_header(std::uint32_t n_paths) const {
    RoutingHeader h;
    h.final_dest = sink_pos_.value_or(pos_);
    h.mode = protocol_ == Protocol::tgpsr ? ForwardingMode::two_hop_greedy : ForwardingMode::greedy;
    h.n_paths = n_paths == 0 ? 1 : n_paths;
    return h;
}

void Router::refresh() {
    const std::uint64_t v = table_ != nullptr ? table_->version() : 0;
    if (v == cached_version_ && cached_sink_ == sink_pos_ && cached_sink_one_hop_ == sink_one_hop_) return;
    neighbors_.clear();
    if (table_ != nullptr) {
        for (const auto& [id, rec] : table_->one_hop()) neighbors_[id] = rec.position;
    }
    if (sink_one_hop_ && sink_pos_) neighbors_[sink_id_] = *sink_pos_;
    planar_ = gabriel_planarize(self_, pos_, neighbors_);
    cached_version_ = v;
    cached_sink_ = sink_pos_;
    cached_sink_one_hop_ = sink_one_hop_;
}

const PlanarNeighborSet& Router::planar() {
    refresh();
    return planar_;
}

const NeighborPositions& Router::routing_neighbors() {
    refresh();
    return neighbors_;
}

ForwardAction Router::forward(RoutingHeader& header, NodeId arrived_from) {
    if (self_ == sink_id_) return {ForwardAction::Kind::deliver, self_, DropCause::none};
    refresh();

    // Relays do no next-hop discovery: the packet goes on, header untouched,
    // to its pinned temporary destination while that node is a live neighbor.
    if (header.mode == ForwardingMode::two_hop_greedy && header.relay == self_ && header.temp_dest &&
        header.temp_dest->id != self_ && neighbors_.contains(header.temp_dest->id)) {
        return {ForwardAction::Kind::transmit, header.temp_dest->id, DropCause::none};
    }

    if (header.hops >= hop_limit_) return {ForwardAction::Kind::drop, kNoNode, DropCause::hop_limit};
    ++header.hops;

    if (sink_one_hop_ && sink_pos_) {
        header.mode = ForwardingMode::greedy;
        header.temp_dest.reset();
        header.relay.reset();
        header.perimeter.reset();
        return {ForwardAction::Kind::transmit, sink_id_, DropCause::none};
    }

    if (header.mode == ForwardingMode::perimeter && header.perimeter) {
        const auto step = perimeter_next_hop(self_, pos_, planar_, neighbors_, header, arrived_from);
        switch (step.kind) {
        case PerimeterStep::Kind::forward: return {ForwardAction::Kind::transmit, step.next_hop, DropCause::none};
        case PerimeterStep::Kind::loop:
        case PerimeterStep::Kind::no_neighbor: return {ForwardAction::Kind::drop, kNoNode, DropCause::routing_failure};
        case PerimeterStep::Kind::recovered: header.perimeter.reset(); break;
        }
    }
    return greedy_family(header);
}

ForwardAction Router::greedy_family(RoutingHeader& header) {
    header.temp_dest.reset();
    header.relay.reset();
    header.perimeter.reset();
    if (protocol_ == Protocol::tgpsr && table_ != nullptr) {
        const auto pairs = tgpsr_select_paths(*table_, pos_, header.final_dest, header.n_paths);
        if (!pairs.empty()) {
            const PathPair& p = pairs[round_robin_++ % pairs.size()];
            const auto& rec = table_->two_hop().at(p.relay).at(p.temp_dest);
            header.mode = ForwardingMode::two_hop_greedy;
            header.temp_dest = TempDestination{p.temp_dest, rec.position};
            header.relay = p.relay;
            return {ForwardAction::Kind::transmit, p.relay, DropCause::none};
        }
    }
    if (auto g = greedy_next_hop(pos_, neighbors_, header.final_dest)) {
        header.mode = ForwardingMode::greedy;
        return {ForwardAction::Kind::transmit, *g, DropCause::none};
    }
    return enter_perimeter(header);
}

ForwardAction Router::enter_perimeter(RoutingHeader& header) {
    header.mode = ForwardingMode::perimeter;
    header.perimeter = PerimeterState{pos_, pos_, std::nullopt};
    const auto step = perimeter_next_hop(self_, pos_, planar_, neighbors_, header, kNoNode);
    if (step.kind == PerimeterStep::Kind::forward) return {ForwardAction::Kind::transmit, step.next_hop, DropCause::none};
    return {ForwardAction::Kind::drop, kNoNode, DropCause::routing_failure};
}

} // namespace tgpsr
