#include "tgpsr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tgpsr {

void SelectionWeights::validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0) || std::abs(alpha + beta - 1.0) > 1e-9)
        throw Error(ErrorCode::invalid_argument, "selection weights must be non-negative and sum to 1");
}

void PathRequirement::validate() const {
    if (!(capture_rate >= 0.0)) throw Error(ErrorCode::invalid_argument, "capture rate must be >= 0");
    if (!(path_factor > 0.0)) throw Error(ErrorCode::invalid_argument, "path factor must be > 0");
}

std::size_t nb_optimal_paths(const PathRequirement& req) {
    req.validate();
    const double want = std::ceil(req.capture_rate * req.path_factor);
    return want < 1.0 ? 1 : static_cast<std::size_t>(want);
}

namespace {

std::size_t lookup(const std::map<NodeId, std::size_t>& m, NodeId id) {
    auto it = m.find(id);
    if (it == m.end())
        throw Error(ErrorCode::incomplete_information, "no information for cover set member " + std::to_string(id));
    return it->second;
}

} // namespace

double r_2hop(const CoverSet& cs, const std::map<NodeId, std::size_t>& f2_sizes,
              const std::map<NodeId, std::size_t>& paths) {
    if (cs.members.empty()) throw Error(ErrorCode::invalid_argument, "empty cover set");
    double sum = 0.0;
    for (NodeId w : cs.members) {
        const std::size_t p = lookup(paths, w);
        if (p == 0) throw Error(ErrorCode::invalid_argument, "path count must be >= 1");
        sum += static_cast<double>(lookup(f2_sizes, w)) / static_cast<double>(p);
    }
    return sum / static_cast<double>(cs.members.size());
}

double r_relay(const CoverSet& cs, const std::map<NodeId, std::size_t>& f_sizes,
               const std::map<NodeId, std::size_t>& f2_sizes) {
    if (cs.members.empty()) throw Error(ErrorCode::invalid_argument, "empty cover set");
    double sum = 0.0;
    for (NodeId w : cs.members) {
        const std::size_t f = lookup(f_sizes, w);
        const std::size_t f2 = lookup(f2_sizes, w);
        if (f2 > 0) sum += static_cast<double>(f) / static_cast<double>(f2);
    }
    return sum / static_cast<double>(cs.members.size());
}

double tq(const SelectionWeights& w, double r2, double rr) {
    w.validate();
    return w.alpha * r2 + w.beta * rr;
}

CoverSetInfoRound::CoverSetInfoRound(std::vector<NodeId> asked, double deadline)
    : asked_(std::move(asked)), deadline_(deadline) {}

bool CoverSetInfoRound::record_reply(NodeId member, const MemberInfo& info, double now) {
    if (now > deadline_) return false;
    if (std::find(asked_.begin(), asked_.end(), member) == asked_.end()) return false;
    replies_[member] = info;
    return true;
}

bool CoverSetInfoRound::complete_for(const CoverSet& cs) const {
    return std::all_of(cs.members.begin(), cs.members.end(), [&](NodeId m) {
        return m == cs.owner || replies_.contains(m);
    });
}

std::vector<NodeId> request_targets(const std::vector<CoverSet>& candidates) {
    std::set<NodeId> ids;
    for (const auto& cs : candidates) {
        for (NodeId m : cs.members) {
            if (m != cs.owner) ids.insert(m);
        }
    }
    return {ids.begin(), ids.end()};
}

void score_cover_set(CoverSet& cs, const std::map<NodeId, MemberInfo>& info, const SelectionWeights& w,
                     double path_factor) {
    std::map<NodeId, std::size_t> f, f2, paths;
    double min_energy = std::numeric_limits<double>::infinity();
    for (NodeId m : cs.members) {
        auto it = info.find(m);
        if (it == info.end())
            throw Error(ErrorCode::incomplete_information, "no information for cover set member " + std::to_string(m));
        f[m] = it->second.f_size;
        f2[m] = it->second.f2_size;
        paths[m] = nb_optimal_paths({it->second.capture_rate, path_factor});
        min_energy = std::min(min_energy, it->second.residual_energy);
    }
    CoverSetScore s;
    s.r2hop = r_2hop(cs, f2, paths);
    s.rrelay = r_relay(cs, f, f2);
    s.tq = tq(w, s.r2hop, s.rrelay);
    s.min_residual_energy = min_energy;
    cs.score = s;
}

CoverSet select_cover_set(NodeId owner, const std::vector<CoverSet>& candidates, double energy_floor) {
    const CoverSet* best = nullptr;
    for (const auto& cs : candidates) {
        if (!cs.score) continue;
        if (cs.score->min_residual_energy < energy_floor) continue;
        if (best == nullptr) {
            best = &cs;
            continue;
        }
        const auto& a = *cs.score;
        const auto& b = *best->score;
        bool better = false;
        if (a.tq != b.tq) {
            better = a.tq > b.tq;
        } else if (a.min_residual_energy != b.min_residual_energy) {
            better = a.min_residual_energy > b.min_residual_energy;
        } else if (cs.members.size() != best->members.size()) {
            better = cs.members.size() < best->members.size();
        } else {
            better = cs.members < best->members;
        }
        if (better) best = &cs;
    }
    if (best == nullptr) return CoverSet{owner, {owner}, std::nullopt};
    return *best;
}

} // namespace tgpsr
