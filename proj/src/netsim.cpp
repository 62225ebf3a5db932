#include "tgpsr/netsim.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace tgpsr {

void Engine::schedule(double time, EventKind kind, NodeId target, Action action) {
    if (!(time >= now_))
        throw Error(ErrorCode::internal, "event scheduled in the past (" + std::to_string(time) + " < " +
                                             std::to_string(now_) + ")");
    queue_.push(Event{time, next_seq_++, kind, target, std::move(action)});
}

EngineStats Engine::run_until(double t_end) {
    while (!queue_.empty() && queue_.top().time <= t_end) {
        // priority_queue::top is const; the action is moved out via a copy of the handle
        Event ev = std::move(const_cast<Event&>(queue_.top()));
        queue_.pop();
        now_ = ev.time;
        std::uint64_t bits = 0;
        std::memcpy(&bits, &ev.time, sizeof bits);
        for (std::uint64_t word : {bits, static_cast<std::uint64_t>(ev.kind), static_cast<std::uint64_t>(ev.target)}) {
            hash_ ^= word;
            hash_ *= 1099511628211ULL;
        }
        ++stats_.events_processed;
        if (ev.action) ev.action();
    }
    if (t_end > now_) now_ = t_end;
    return stats_;
}

void RadioModel::validate() const {
    if (!(range > 0.0)) throw Error(ErrorCode::invalid_argument, "radio range must be positive");
    if (!(bitrate > 0.0)) throw Error(ErrorCode::invalid_argument, "bitrate must be positive");
}

void MacConfig::validate() const {
    if (!(cca_duration > 0.0) || !(backoff_slot > 0.0) || !(turnaround >= 0.0) || !(ack_wait > 0.0))
        throw Error(ErrorCode::invalid_argument, "MAC timings must be positive");
    if (max_backoff_exponent < min_backoff_exponent || max_backoff_exponent > 20)
        throw Error(ErrorCode::invalid_argument, "invalid backoff exponents");
    if (queue_capacity == 0) throw Error(ErrorCode::invalid_argument, "MAC queue capacity must be positive");
}

Channel::Channel(Engine& engine, RadioModel radio, std::vector<Position> positions)
    : engine_(engine), radio_(radio) {
    radio_.validate();
    nodes_.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) nodes_[i].pos = positions[i];

    // Bucket grid keeps the all-pairs neighbor search near-linear.
    const double cell = radio_.range;
    std::map<std::pair<long, long>, std::vector<NodeId>> grid;
    auto key = [cell](Position p) {
        return std::pair<long, long>{static_cast<long>(std::floor(p.x / cell)), static_cast<long>(std::floor(p.y / cell))};
    };
    for (NodeId i = 0; i < nodes_.size(); ++i) grid[key(nodes_[i].pos)].push_back(i);
    const double r2 = radio_.range * radio_.range;
    for (NodeId i = 0; i < nodes_.size(); ++i) {
        const auto [cx, cy] = key(nodes_[i].pos);
        auto& nb = nodes_[i].neighbors;
        for (long dx = -1; dx <= 1; ++dx) {
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find({cx + dx, cy + dy});
                if (it == grid.end()) continue;
                for (NodeId j : it->second) {
                    if (j != i && distance_sq(nodes_[i].pos, nodes_[j].pos) <= r2) nb.push_back(j);
                }
            }
        }
        std::sort(nb.begin(), nb.end());
    }
}

void Channel::recompute_neighbors(NodeId id) {
    const double r2 = radio_.range * radio_.range;
    auto& self = nodes_[id];
    for (NodeId j : self.neighbors) {
        auto& v = nodes_[j].neighbors;
        v.erase(std::remove(v.begin(), v.end(), id), v.end());
    }
    self.neighbors.clear();
    for (NodeId j = 0; j < nodes_.size(); ++j) {
        if (j == id) continue;
        if (distance_sq(self.pos, nodes_[j].pos) <= r2) {
            self.neighbors.push_back(j);
            auto& v = nodes_[j].neighbors;
            v.insert(std::lower_bound(v.begin(), v.end(), id), id);
        }
    }
}

void Channel::move(NodeId id, Position pos) {
    if (nodes_.at(id).pos == pos) return;
    nodes_[id].pos = pos;
    recompute_neighbors(id);
}

void Channel::attach(NodeId id, RxHandler on_rx) { nodes_.at(id).rx = std::move(on_rx); }

void Channel::audible_up(NodeRadio& n) {
    if (n.audible++ == 0) n.busy_start = engine_.now();
}

void Channel::audible_down(NodeRadio& n) {
    if (--n.audible == 0) n.busy_total += engine_.now() - n.busy_start;
}

double Channel::busy_time(NodeId id) const {
    const auto& n = nodes_.at(id);
    return n.busy_total + (n.audible > 0 ? engine_.now() - n.busy_start : 0.0);
}

bool Channel::clear_since(NodeId id, double since) const {
    const auto& n = nodes_.at(id);
    return !n.transmitting && n.incoming.empty() && n.last_audible_end <= since;
}

void Channel::transmit(NodeId sender, FramePtr frame, double airtime, TxDone on_done) {
    auto& s = nodes_.at(sender);
    if (s.transmitting) throw Error(ErrorCode::internal, "radio already transmitting");
    const std::uint64_t tx = next_tx_++;
    ++counters_.transmissions;
    ++engine_.stats().frames_sent;
    const bool unicast = !frame->is_broadcast();
    if (unicast) ++counters_.unicast_sent;
    else ++counters_.broadcast_sent;

    // half duplex: whatever the sender was receiving is gone
    for (auto& in : s.incoming) in.corrupted = true;
    s.transmitting = true;
    audible_up(s);

    std::vector<NodeId> receivers = s.neighbors;
    if (unicast && !std::binary_search(receivers.begin(), receivers.end(), frame->dst))
        ++counters_.unicast_out_of_range;
    for (NodeId r : receivers) {
        auto& rn = nodes_[r];
        bool corrupted = rn.transmitting;
        if (!rn.incoming.empty()) {
            corrupted = true;
            for (auto& in : rn.incoming) in.corrupted = true;
        }
        rn.incoming.push_back({tx, corrupted});
        audible_up(rn);
    }

    engine_.schedule_in(airtime, EventKind::frame_end, sender,
                        [this, sender, tx, frame = std::move(frame), receivers = std::move(receivers),
                         on_done = std::move(on_done)]() {
                            auto& s2 = nodes_[sender];
                            s2.transmitting = false;
                            s2.last_audible_end = engine_.now();
                            audible_down(s2);
                            for (NodeId r : receivers) {
                                auto& rn = nodes_[r];
                                auto it = std::find_if(rn.incoming.begin(), rn.incoming.end(),
                                                       [tx](const Incoming& in) { return in.tx_id == tx; });
                                if (it == rn.incoming.end()) continue;
                                const bool ok = !it->corrupted;
                                rn.incoming.erase(it);
                                rn.last_audible_end = engine_.now();
                                audible_down(rn);
                                const bool addressed = frame->is_broadcast() || frame->dst == r;
                                if (frame->is_broadcast()) {
                                    ok ? ++counters_.broadcast_receptions : ++counters_.broadcast_collisions;
                                } else if (frame->dst == r) {
                                    ok ? ++counters_.unicast_received : ++counters_.unicast_collided;
                                }
                                if (!ok && addressed) ++engine_.stats().collisions;
                                if (ok && addressed && rn.rx) rn.rx(frame);
                            }
                            if (on_done) on_done();
                        });
}

Mac::Mac(NodeId id, Engine& engine, Channel& channel, const MacConfig& config)
    : id_(id), engine_(engine), channel_(channel), config_(config) {
    config_.validate();
    channel_.attach(id_, [this](const FramePtr& f) { on_rx(f); });
}

double Mac::frame_airtime(const Frame& f) const {
    if (f.is_ack()) return static_cast<double>(config_.ack_frame_bytes) * 8.0 / channel_.radio().bitrate;
    return channel_.radio().airtime(f.payload_bytes);
}

bool Mac::enqueue(Frame frame, Done done) {
    if (queue_.size() >= config_.queue_capacity) {
        ++counters_.queue_drops;
        return false;
    }
    frame.src = id_;
    frame.mac_seq = next_seq_++;
    ++counters_.enqueued;
    queue_.push_back({std::make_shared<const Frame>(std::move(frame)), std::move(done)});
    start_service();
    return true;
}

unsigned Mac::draw_slots() {
    const unsigned top = (1u << be_) - 1u;
    switch (config_.backoff) {
    case BackoffPolicy::min: return 0;
    case BackoffPolicy::max: return top;
    case BackoffPolicy::random: break;
    }
    std::uniform_int_distribution<unsigned> d(0, top);
    return d(engine_.rng());
}

void Mac::start_service() {
    if (serving_ || queue_.empty()) return;
    serving_ = true;
    attempts_ = 0;
    begin_csma();
}

void Mac::begin_csma() {
    nb_ = 0;
    be_ = config_.min_backoff_exponent;
    schedule_backoff();
}

void Mac::schedule_backoff() {
    const double delay = static_cast<double>(draw_slots()) * config_.backoff_slot;
    engine_.schedule_in(delay, EventKind::timer, id_, [this]() {
        const double started = engine_.now();
        engine_.schedule_in(config_.cca_duration, EventKind::timer, id_, [this, started]() { cca_end(started); });
    });
}

void Mac::cca_end(double started) {
    if (channel_.clear_since(id_, started)) {
        engine_.schedule_in(config_.turnaround, EventKind::frame_start, id_, [this]() { tx_start(); });
        return;
    }
    ++nb_;
    be_ = std::min(be_ + 1, config_.max_backoff_exponent);
    if (nb_ > config_.max_csma_backoffs) {
        ++counters_.channel_access_failures;
        attempt_failed();
        return;
    }
    schedule_backoff();
}

void Mac::tx_start() {
    if (channel_.transmitting(id_)) { // an ACK of ours is on the air
        ++nb_;
        be_ = std::min(be_ + 1, config_.max_backoff_exponent);
        schedule_backoff();
        return;
    }
    ++counters_.attempts;
    const FramePtr& f = queue_.front().frame;
    channel_.transmit(id_, f, frame_airtime(*f), [this]() { tx_end(); });
}

void Mac::tx_end() {
    if (queue_.front().frame->is_broadcast()) {
        finish(true);
        return;
    }
    awaiting_ack_ = true;
    const std::uint64_t token = ++ack_token_;
    engine_.schedule_in(config_.ack_wait, EventKind::timer, id_, [this, token]() { ack_timeout(token); });
}

void Mac::ack_timeout(std::uint64_t token) {
    if (token != ack_token_ || !awaiting_ack_) return;
    awaiting_ack_ = false;
    attempt_failed();
}

void Mac::attempt_failed() {
    if (attempts_ < config_.max_retries) {
        ++attempts_;
        ++counters_.retries;
        begin_csma();
        return;
    }
    finish(false);
}

void Mac::finish(bool ok) {
    Pending p = std::move(queue_.front());
    queue_.pop_front();
    serving_ = false;
    ok ? ++counters_.delivered : ++counters_.failed;
    if (p.done) p.done(ok);
    start_service();
    if (idle_hook_) idle_hook_();
}

void Mac::on_rx(const FramePtr& frame) {
    if (frame->is_ack()) {
        if (frame->dst != id_ || !awaiting_ack_ || queue_.empty()) return;
        const Frame& cur = *queue_.front().frame;
        if (frame->src == cur.dst && frame->mac_seq == cur.mac_seq) {
            awaiting_ack_ = false;
            ++ack_token_;
            finish(true);
        }
        return;
    }
    if (!frame->is_broadcast()) {
        const NodeId peer = frame->src;
        const std::uint32_t seq = frame->mac_seq;
        engine_.schedule_in(config_.turnaround, EventKind::frame_start, id_, [this, peer, seq]() {
            if (channel_.transmitting(id_)) return;
            ++counters_.acks_sent;
            auto ack = std::make_shared<Frame>();
            ack->src = id_;
            ack->dst = peer;
            ack->mac_seq = seq;
            ack->msg = AckMsg{};
            channel_.transmit(id_, ack, frame_airtime(*ack), {});
        });
        auto it = last_seq_from_.find(peer);
        if (it != last_seq_from_.end() && it->second == seq) {
            ++counters_.duplicates;
            return;
        }
        last_seq_from_[peer] = seq;
    }
    if (upper_) upper_(frame);
}

} // namespace tgpsr
