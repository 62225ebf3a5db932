#pragma once

#include <deque>
#include <functional>
#include <map>
#include <queue>
#include <vector>

#include "tgpsr/packet.hpp"
#include "tgpsr/types.hpp"

namespace tgpsr {

enum class EventKind : std::uint8_t { timer, frame_start, frame_end, app };

struct EngineStats {
    std::uint64_t events_processed = 0;
    std::uint64_t frames_sent = 0;
    std::uint64_t collisions = 0;
};

/// Single-timeline discrete-event scheduler. Events at equal times run in
/// insertion order.
class Engine {
public:
    using Action = std::function<void()>;
    static constexpr NodeId kEngineTarget = kNoNode;

    explicit Engine(std::uint64_t seed) : rng_(seed) {}

    double now() const { return now_; }
    Rng& rng() { return rng_; }

    /// Throws Error(internal) for a time in the past.
    void schedule(double time, EventKind kind, NodeId target, Action action);
    void schedule_in(double delay, EventKind kind, NodeId target, Action action) {
        schedule(now_ + delay, kind, target, std::move(action));
    }

    /// Runs every event with time <= t_end, then advances the clock to t_end.
    EngineStats run_until(double t_end);
    bool empty() const { return queue_.empty(); }
    std::size_t pending() const { return queue_.size(); }

    /// Running hash of (time, kind, target) over executed events.
    std::uint64_t trace_hash() const { return hash_; }
    EngineStats& stats() { return stats_; }
    const EngineStats& stats() const { return stats_; }

private:
    struct Event {
        double time;
        std::uint64_t seq;
        EventKind kind;
        NodeId target;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    double now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t hash_ = 1469598103934665603ULL;
    Rng rng_;
    EngineStats stats_;
};

struct RadioModel {
    double range = 150.0;         // meters
    double bitrate = 250000.0;    // bits/second
    std::size_t frame_overhead = 12; // bytes per frame

    void validate() const;
    double airtime(std::size_t payload_bytes) const {
        return static_cast<double>(payload_bytes + frame_overhead) * 8.0 / bitrate;
    }
};

enum class BackoffPolicy { random, min, max };

struct MacConfig {
    double cca_duration = 128e-6;
    double backoff_slot = 320e-6;
    double turnaround = 192e-6;
    double ack_wait = 864e-6;
    unsigned min_backoff_exponent = 3;
    unsigned max_backoff_exponent = 5;
    unsigned max_csma_backoffs = 4;
    unsigned max_retries = 5;
    std::size_t queue_capacity = 64;
    std::size_t ack_frame_bytes = 11; // complete on-air ACK
    BackoffPolicy backoff = BackoffPolicy::random;

    void validate() const;
};

struct ChannelCounters {
    std::uint64_t transmissions = 0;
    std::uint64_t unicast_sent = 0;
    std::uint64_t unicast_received = 0;
    std::uint64_t unicast_collided = 0;
    std::uint64_t unicast_out_of_range = 0;
    std::uint64_t broadcast_sent = 0;
    std::uint64_t broadcast_receptions = 0;
    std::uint64_t broadcast_collisions = 0;
};

/// Unit-disk shared medium. A reception at r is destroyed when any other
/// audible transmission overlaps it at r, or when r transmits meanwhile.
class Channel {
public:
    using RxHandler = std::function<void(const FramePtr&)>;
    using TxDone = std::function<void()>;

    Channel(Engine& engine, RadioModel radio, std::vector<Position> positions);

    std::size_t size() const { return nodes_.size(); }
    const RadioModel& radio() const { return radio_; }
    Position position(NodeId id) const { return nodes_.at(id).pos; }
    void move(NodeId id, Position pos);
    const std::vector<NodeId>& in_range(NodeId id) const { return nodes_.at(id).neighbors; }

    void attach(NodeId id, RxHandler on_rx);

    void transmit(NodeId sender, FramePtr frame, double airtime, TxDone on_done);

    /// Nothing audible now and nothing ended after `since`.
    bool clear_since(NodeId id, double since) const;
    bool transmitting(NodeId id) const { return nodes_.at(id).transmitting; }
    double busy_time(NodeId id) const;

    const ChannelCounters& counters() const { return counters_; }

private:
    struct Incoming {
        std::uint64_t tx_id;
        bool corrupted;
    };
    struct NodeRadio {
        Position pos;
        std::vector<NodeId> neighbors;
        std::vector<Incoming> incoming;
        bool transmitting = false;
        int audible = 0;
        double busy_start = 0.0;
        double busy_total = 0.0;
        double last_audible_end = -1.0;
        RxHandler rx;
    };

    void recompute_neighbors(NodeId id);
    void audible_up(NodeRadio& n);
    void audible_down(NodeRadio& n);

    Engine& engine_;
    RadioModel radio_;
    std::vector<NodeRadio> nodes_;
    std::uint64_t next_tx_ = 0;
    ChannelCounters counters_;
};

struct MacCounters {
    std::uint64_t enqueued = 0;
    std::uint64_t queue_drops = 0;
    std::uint64_t attempts = 0;
    std::uint64_t retries = 0;
    std::uint64_t channel_access_failures = 0;
    std::uint64_t delivered = 0;
    std::uint64_t failed = 0;
    std::uint64_t acks_sent = 0;
    std::uint64_t duplicates = 0;
};

/// Unslotted CSMA/CA with binary exponential backoff, ACKed unicast and
/// bounded retransmission.
class Mac {
public:
    using Done = std::function<void(bool delivered)>;
    using Upper = std::function<void(const FramePtr&)>;

    Mac(NodeId id, Engine& engine, Channel& channel, const MacConfig& config);

    /// Queues a frame; src and mac_seq are filled in. Returns false (tail
    /// drop) when the queue is full; `done` is then not called.
    bool enqueue(Frame frame, Done done = {});
    void set_upper(Upper upper) { upper_ = std::move(upper); }
    /// Called once the MAC finishes a frame and has room again.
    void set_idle_hook(std::function<void()> hook) { idle_hook_ = std::move(hook); }

    std::size_t queue_size() const { return queue_.size(); }
    const MacCounters& counters() const { return counters_; }

    double frame_airtime(const Frame& f) const;

private:
    struct Pending {
        FramePtr frame;
        Done done;
    };

    void on_rx(const FramePtr& frame);
    void start_service();
    void begin_csma();
    void schedule_backoff();
    void cca_end(double started);
    void tx_start();
    void tx_end();
    void ack_timeout(std::uint64_t token);
    void attempt_failed();
    void finish(bool ok);
    unsigned draw_slots();

    NodeId id_;
    Engine& engine_;
    Channel& channel_;
    MacConfig config_;
    std::deque<Pending> queue_;
    bool serving_ = false;
    bool awaiting_ack_ = false;
    std::uint64_t ack_token_ = 0;
    unsigned nb_ = 0;
    unsigned be_ = 0;
    unsigned attempts_ = 0;
    std::uint32_t next_seq_ = 0;
    std::map<NodeId, std::uint32_t> last_seq_from_;
    Upper upper_;
    std::function<void()> idle_hook_;
    MacCounters counters_;
};

} // namespace tgpsr
