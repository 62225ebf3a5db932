#include "tgpsr/neighborhood.hpp"

#include <algorithm>
#include <set>

namespace tgpsr {

void NeighborTable::add_one_hop(const NeighborRecord& rec) {
    if (rec.id == owner_) return;
    one_hop_[rec.id] = rec;
    ++version_;
}

void NeighborTable::set_two_hop(NodeId via, const std::vector<NeighborRecord>& records) {
    if (!one_hop_.contains(via)) return;
    RecordMap& slot = two_hop_[via];
    slot.clear();
    for (const auto& r : records) {
        if (r.id == owner_ || r.id == via) continue;
        slot[r.id] = r;
    }
    ++version_;
}

const NeighborRecord* NeighborTable::find(NodeId id) const {
    auto it = one_hop_.find(id);
    return it == one_hop_.end() ? nullptr : &it->second;
}

std::vector<NeighborRecord> NeighborTable::one_hop_records() const {
    std::vector<NeighborRecord> out;
    out.reserve(one_hop_.size());
    for (const auto& [id, rec] : one_hop_) out.push_back(rec);
    return out;
}

std::vector<NodeId> forwarders(const NeighborTable& table, Position self_pos, Position sink_pos) {
    const double self_d = distance(self_pos, sink_pos);
    std::vector<NodeId> out;
    for (const auto& [id, rec] : table.one_hop()) {
        if (distance(rec.position, sink_pos) < self_d) out.push_back(id);
    }
    return out;
}

std::vector<NodeId> forwarders2(const NeighborTable& table, Position self_pos, NodeId u, Position sink_pos) {
    const NeighborRecord* ru = table.find(u);
    if (ru == nullptr || !(distance(ru->position, sink_pos) < distance(self_pos, sink_pos)))
        throw Error(ErrorCode::precondition, "node " + std::to_string(u) + " is not a 1-hop forwarder");
    std::vector<NodeId> out;
    auto it = table.two_hop().find(u);
    if (it == table.two_hop().end()) return out;
    const double u_d = distance(ru->position, sink_pos);
    for (const auto& [k, rec] : it->second) {
        if (k == table.owner()) continue;
        if (distance(rec.position, sink_pos) < u_d) out.push_back(k);
    }
    return out;
}

std::vector<NodeId> forwarders2_union(const NeighborTable& table, Position self_pos, Position sink_pos) {
    std::set<NodeId> acc;
    for (NodeId u : forwarders(table, self_pos, sink_pos)) {
        for (NodeId k : forwarders2(table, self_pos, u, sink_pos)) acc.insert(k);
    }
    acc.erase(table.owner());
    return {acc.begin(), acc.end()};
}

std::vector<ScheduledBroadcast> run_discovery(double now, const DiscoveryTiming& timing, Rng& rng) {
    std::uniform_real_distribution<double> hello(0.0, timing.hello_jitter);
    std::uniform_real_distribution<double> table(0.0, timing.table_jitter);
    const double t_hello = now + hello(rng);
    const double t_table = now + timing.table_round_start + table(rng);
    return {{t_hello, DiscoveryRound::hello}, {t_table, DiscoveryRound::table}};
}

} // namespace tgpsr
