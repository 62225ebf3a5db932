#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "tgpsr/imaging.hpp"
#include "tgpsr/neighborhood.hpp"
#include "tgpsr/routing.hpp"
#include "tgpsr/selection.hpp"

namespace tgpsr {

inline constexpr NodeId kBroadcast = kNoNode - 1;

struct HelloMsg {
    NeighborRecord self;
};

struct TableMsg {
    NeighborRecord self;
    std::vector<NeighborRecord> one_hop;
};

struct InfoRequestMsg {
    std::uint32_t round = 0;
    Position sink;
};

struct InfoReplyMsg {
    std::uint32_t round = 0;
    MemberInfo info;
};

struct ActivateMsg {
    NodeId sentry = kNoNode;
};

struct BeaconMsg {
    std::uint32_t seq = 0;
    Position sink;
};

struct ImageFragmentMsg {
    Fragment fragment;
    NodeId source = kNoNode;
    RoutingHeader header;
};

struct AckMsg {};

using Message = std::variant<HelloMsg, TableMsg, InfoRequestMsg, InfoReplyMsg, ActivateMsg, BeaconMsg,
                             ImageFragmentMsg, AckMsg>;

/// One MAC frame on the air.
struct Frame {
    NodeId src = kNoNode;
    NodeId dst = kBroadcast;
    std::uint32_t mac_seq = 0;
    std::size_t payload_bytes = 0; // excludes per-frame overhead
    Message msg;

    bool is_broadcast() const { return dst == kBroadcast; }
    bool is_ack() const { return std::holds_alternative<AckMsg>(msg); }
};

using FramePtr = std::shared_ptr<const Frame>;

} // namespace tgpsr
