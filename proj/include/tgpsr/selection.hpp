#pragma once

#include <map>
#include <vector>

#include "tgpsr/geometry.hpp"
#include "tgpsr/types.hpp"

namespace tgpsr {

struct SelectionWeights {
    double alpha = 0.5;
    double beta = 0.5;

    void validate() const;
};

struct PathRequirement {
    double capture_rate = 1.0; // images per second
    double path_factor = 1.0;  // paths per (image/second)

    void validate() const;
};

/// max(1, ceil(capture_rate * path_factor)).
std::size_t nb_optimal_paths(const PathRequirement& req);

/// Mean of |F2(w)| / NbOptimalPaths(w) over the members. Unclamped.
/// Throws Error(incomplete_information) when a member is missing from a map.
double r_2hop(const CoverSet& cs, const std::map<NodeId, std::size_t>& f2_sizes,
              const std::map<NodeId, std::size_t>& paths);

/// Mean of |F(w)| / |F2(w)| over the members; a member with |F2(w)| = 0
/// contributes 0.
double r_relay(const CoverSet& cs, const std::map<NodeId, std::size_t>& f_sizes,
               const std::map<NodeId, std::size_t>& f2_sizes);

double tq(const SelectionWeights& w, double r2, double rr);

/// Answer a cover-set member gives to an INFO-REQUEST.
struct MemberInfo {
    std::size_t f_size = 0;
    std::size_t f2_size = 0;
    double residual_energy = 0.0;
    double capture_rate = 0.0;
};

/// Book-keeping of one on-demand request round at a sentry: which members
/// were asked, who answered, and when the round times out.
class CoverSetInfoRound {
public:
    CoverSetInfoRound() = default;
    CoverSetInfoRound(std::vector<NodeId> asked, double deadline);

    const std::vector<NodeId>& asked() const { return asked_; }
    double deadline() const { return deadline_; }

    /// Returns false for a reply from a node that was not asked, or after
    /// the deadline.
    bool record_reply(NodeId member, const MemberInfo& info, double now);
    bool all_replied() const { return replies_.size() == asked_.size(); }
    bool complete_for(const CoverSet& cs) const;
    const std::map<NodeId, MemberInfo>& replies() const { return replies_; }

private:
    std::vector<NodeId> asked_;
    std::map<NodeId, MemberInfo> replies_;
    double deadline_ = 0.0;
};

/// Unicast targets for a request round: the distinct members of the
/// candidates, excluding the owner (whose data is local).
std::vector<NodeId> request_targets(const std::vector<CoverSet>& candidates);

/// Fills cs.score from member information. Throws Error(incomplete_information)
/// when a member has no entry.
void score_cover_set(CoverSet& cs, const std::map<NodeId, MemberInfo>& info, const SelectionWeights& w,
                     double path_factor);

/// Argmax TQ among scored candidates whose minimum member energy is at least
/// energy_floor. Ties: higher minimum energy, then fewer members, then the
/// lexicographically smallest member list. Falls back to {owner}.
CoverSet select_cover_set(NodeId owner, const std::vector<CoverSet>& candidates, double energy_floor);

} // namespace tgpsr
