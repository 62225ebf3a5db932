// Builders shared by the test binaries.
#pragma once

#include <vector>

#include "oracles.hpp"
#include "tgpsr/neighborhood.hpp"
#include "tgpsr/routing.hpp"

namespace fixture {

using tgpsr::NeighborRecord;
using tgpsr::NeighborTable;
using tgpsr::NodeId;

inline NeighborRecord record(const oracle::Topology& t, NodeId id) {
    NeighborRecord r;
    r.id = id;
    r.position = t.pos[id];
    r.residual_energy = 100.0;
    return r;
}

// What v knows after a collision-free two-round discovery.
inline NeighborTable full_table(const oracle::Topology& t, NodeId v) {
    NeighborTable tab(v);
    for (NodeId u : t.nbrs(v)) tab.add_one_hop(record(t, u));
    for (NodeId u : t.nbrs(v)) {
        std::vector<NeighborRecord> recs;
        for (NodeId k : t.nbrs(u)) recs.push_back(record(t, k));
        tab.set_two_hop(u, recs);
    }
    return tab;
}

inline std::vector<NeighborTable> all_tables(const oracle::Topology& t) {
    std::vector<NeighborTable> out;
    for (NodeId v = 0; v < t.pos.size(); ++v) out.push_back(full_table(t, v));
    return out;
}

} // namespace fixture

namespace fixture {

// Tables for every sensor when node `sink` is the robot: the sink takes no
// part in discovery, so it never appears in a table.
inline std::vector<NeighborTable> sensor_tables(const oracle::Topology& t, NodeId sink) {
    std::vector<NeighborTable> out;
    for (NodeId v = 0; v < t.pos.size(); ++v) {
        NeighborTable tab(v);
        if (v != sink) {
            for (NodeId u : t.nbrs(v))
                if (u != sink) tab.add_one_hop(record(t, u));
            for (NodeId u : t.nbrs(v)) {
                if (u == sink) continue;
                std::vector<NeighborRecord> recs;
                for (NodeId k : t.nbrs(u))
                    if (k != sink) recs.push_back(record(t, k));
                tab.set_two_hop(u, recs);
            }
        }
        out.push_back(std::move(tab));
    }
    return out;
}

struct Trace {
    bool delivered = false;
    tgpsr::DropCause cause = tgpsr::DropCause::none;
    std::vector<NodeId> path; // every MAC hop, source first
    bool bad_link = false;    // a transmit to a node out of range
};

// Walks one packet hop by hop through per-node routers on an ideal channel.
class Network {
public:
    Network(const oracle::Topology& t, NodeId sink, tgpsr::Protocol proto, std::uint32_t n_paths = 1)
        : topo_(t), sink_(sink), n_paths_(n_paths), tables_(sensor_tables(t, sink)) {
        for (NodeId v = 0; v < t.pos.size(); ++v) {
            routers_.emplace_back(v, t.pos[v], proto, sink, &tables_[v]);
            routers_.back().set_sink(t.pos[sink], v != sink && t.linked(v, sink));
        }
    }
    Network(const Network&) = delete; // routers point into tables_

    Trace send(NodeId src, std::size_t max_steps = 5000) {
        Trace tr;
        auto h = routers_[src].make_header(n_paths_);
        NodeId cur = src, prev = tgpsr::kNoNode;
        tr.path.push_back(src);
        for (std::size_t step = 0; step < max_steps; ++step) {
            const auto a = routers_[cur].forward(h, prev);
            if (a.kind == tgpsr::ForwardAction::Kind::deliver) {
                tr.delivered = true;
                return tr;
            }
            if (a.kind == tgpsr::ForwardAction::Kind::drop) {
                tr.cause = a.cause;
                return tr;
            }
            if (!topo_.linked(cur, a.next_hop)) {
                tr.bad_link = true;
                return tr;
            }
            prev = cur;
            cur = a.next_hop;
            tr.path.push_back(cur);
        }
        tr.cause = tgpsr::DropCause::hop_limit;
        return tr;
    }

    tgpsr::Router& router(NodeId v) { return routers_[v]; }
    const NeighborTable& table(NodeId v) const { return tables_[v]; }

private:
    const oracle::Topology& topo_;
    NodeId sink_;
    std::uint32_t n_paths_;
    std::vector<NeighborTable> tables_;
    std::vector<tgpsr::Router> routers_;
};

} // namespace fixture
