#include "tgpsr/simulation.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <memory>
#include <queue>

namespace tgpsr {

namespace {

constexpr std::size_t kRecordBytes = 24;
constexpr std::size_t kHeaderBytes = 4;
constexpr std::size_t kBeaconBytes = 12;
constexpr std::size_t kInfoBytes = 16;
constexpr std::size_t kActivateBytes = 8;

std::uint64_t fnv(std::uint64_t h, double d) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &d, sizeof bits);
    h ^= bits;
    return h * 1099511628211ULL;
}

Position along_waypoints(const std::vector<Position>& wps, double speed, double t) {
    double budget = speed * t;
    for (std::size_t i = 1; i < wps.size(); ++i) {
        const double len = distance(wps[i - 1], wps[i]);
        if (budget <= len) {
            const double f = len > 0.0 ? budget / len : 0.0;
            return wps[i - 1] + f * (wps[i] - wps[i - 1]);
        }
        budget -= len;
    }
    return wps.back();
}

struct BacklogItem {
    ImageId image;
    std::uint32_t index;
};

struct Node {
    NodeId id = kNoNode;
    Position pos;
    FieldOfView fov;
    double energy = 0.0;
    NeighborTable table;
    std::unique_ptr<Router> router;
    std::unique_ptr<Mac> mac;
    std::vector<CoverSet> cover_sets;

    std::optional<Position> sink_pos;
    std::uint32_t beacon_seq = 0; // 0: nothing heard yet
    std::uint32_t direct_seq = 0;

    std::deque<BacklogItem> backlog;

    std::uint32_t round_id = 0;
    std::optional<CoverSetInfoRound> round;
    std::vector<CoverSet> candidates;
    double round_started = 0.0;

    NeighborRecord record() const {
        return {id, pos, fov.line_of_sight, fov.angle_of_view, fov.depth_of_view, energy};
    }
};

struct ImageMeta {
    NodeId source;
    double capture_time;
};

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, const RunOptions& opts)
        : cfg_(cfg), engine_(cfg.seed), spec_frag_count_(cfg.image.fragment_count()) {
        cfg_.validate();
        record_.scenario = cfg.scenario;
        record_.seed = cfg.seed;
        record_.best_case_latency = cfg.best_case_latency;
        n_paths_ = static_cast<std::uint32_t>(nb_optimal_paths({cfg.capture_rate, cfg.path_factor}));

        Deployment d = opts.deployment ? *opts.deployment : random_deployment(cfg_, engine_.rng());
        if (d.line_of_sight.size() != d.size() || d.residual_energy.size() != d.size())
            throw Error(ErrorCode::invalid_argument, "deployment vectors differ in length");
        const auto n = static_cast<NodeId>(d.size());
        sink_id_ = n;

        std::vector<Position> all = d.positions;
        all.push_back(sink_position(0.0));
        channel_ = std::make_unique<Channel>(engine_, cfg_.radio, all);

        std::uint64_t h = 1469598103934665603ULL;
        for (const auto& p : all) h = fnv(fnv(h, p.x), p.y);
        for (double l : d.line_of_sight) h = fnv(h, l);
        record_.topology_hash = h;

        nodes_.reserve(n);
        for (NodeId i = 0; i < n; ++i) {
            auto node = std::make_unique<Node>();
            node->id = i;
            node->pos = d.positions[i];
            node->fov = {d.positions[i], d.line_of_sight[i], cfg_.angle_of_view(), cfg_.depth_of_view};
            node->energy = d.residual_energy[i];
            node->table = NeighborTable(i);
            node->router = std::make_unique<Router>(i, node->pos, cfg_.routing(), sink_id_, &node->table,
                                                    cfg_.hop_limit);
            node->mac = std::make_unique<Mac>(i, engine_, *channel_, cfg_.mac);
            Node* raw = node.get();
            node->mac->set_upper([this, raw](const FramePtr& f) { on_frame(*raw, f); });
            node->mac->set_idle_hook([this, raw]() { pump(*raw); });
            nodes_.push_back(std::move(node));
        }
        sink_mac_ = std::make_unique<Mac>(sink_id_, engine_, *channel_, cfg_.mac);
        sink_mac_->set_upper([this](const FramePtr& f) { on_sink_frame(f); });

        record_.disconnected_nodes = count_disconnected();
        if (record_.disconnected_nodes > 0) ++record_.warnings;
        fixed_detections_ = opts.detections;
    }

    RunRecord run() {
        schedule_discovery();
        const double t_close = cfg_.discovery.completion_time();
        engine_.schedule(t_close, EventKind::app, Engine::kEngineTarget, [this]() { close_discovery(); });
        engine_.schedule(cfg_.beacon_start, EventKind::app, sink_id_, [this]() { beacon(); });

        // The event schedule is drawn when discovery closes; run up to there
        // first so the end of the run is known.
        engine_.run_until(t_close);
        double last = cfg_.event_start;
        for (const auto& det : record_.detections) last = std::max(last, det.time);
        end_time_ = last + cfg_.drain_time;
        engine_.run_until(end_time_);
        return finish();
    }

private:
    Position sink_position(double t) const {
        if (cfg_.sink_waypoints.size() < 2) return cfg_.sink_start();
        return along_waypoints(cfg_.sink_waypoints, cfg_.sink_speed, t);
    }

    std::size_t count_disconnected() const {
        const std::size_t total = channel_->size();
        std::vector<bool> seen(total, false);
        std::queue<NodeId> q;
        q.push(sink_id_);
        seen[sink_id_] = true;
        std::size_t reached = 0;
        while (!q.empty()) {
            const NodeId v = q.front();
            q.pop();
            ++reached;
            for (NodeId w : channel_->in_range(v)) {
                if (!seen[w]) {
                    seen[w] = true;
                    q.push(w);
                }
            }
        }
        return total - reached;
    }

    void broadcast(Node& n, Message msg, std::size_t bytes) {
        Frame f;
        f.dst = kBroadcast;
        f.payload_bytes = bytes;
        f.msg = std::move(msg);
        n.mac->enqueue(std::move(f));
    }

    bool unicast(Node& n, NodeId dst, Message msg, std::size_t bytes, Mac::Done done = {}) {
        Frame f;
        f.dst = dst;
        f.payload_bytes = bytes;
        f.msg = std::move(msg);
        return n.mac->enqueue(std::move(f), std::move(done));
    }

    // --- neighbor discovery -------------------------------------------------

    void schedule_discovery() {
        for (auto& node : nodes_) {
            Node* n = node.get();
            for (const auto& b : run_discovery(0.0, cfg_.discovery, engine_.rng())) {
                engine_.schedule(b.time, EventKind::app, n->id, [this, n, round = b.round]() {
                    if (round == DiscoveryRound::hello) {
                        broadcast(*n, HelloMsg{n->record()}, kRecordBytes);
                    } else {
                        TableMsg t{n->record(), n->table.one_hop_records()};
                        const std::size_t bytes = kHeaderBytes + kRecordBytes * (t.one_hop.size() + 1);
                        broadcast(*n, std::move(t), bytes);
                    }
                });
            }
        }
    }

    void close_discovery() {
        record_.discovery_hash = engine_.trace_hash();
        std::vector<NodeId> eligible;
        for (auto& n : nodes_) {
            std::map<NodeId, FieldOfView> fovs;
            for (const auto& [id, rec] : n->table.one_hop()) fovs[id] = rec.fov();
            n->cover_sets = enumerate_cover_sets(n->id, n->fov, fovs, cfg_.max_cardinality, cfg_.coverage_spacing);
            if (n->cover_sets.size() > 1) eligible.push_back(n->id);
        }
        record_.eligible_sentries = eligible.size();

        std::vector<Detection> dets;
        if (fixed_detections_) {
            dets = *fixed_detections_;
        } else {
            const auto count = static_cast<std::size_t>(
                std::ceil(cfg_.sentry_fraction * static_cast<double>(eligible.size()) - 1e-9));
            std::shuffle(eligible.begin(), eligible.end(), engine_.rng());
            eligible.resize(std::min(count, eligible.size()));
            std::sort(eligible.begin(), eligible.end());
            std::uniform_real_distribution<double> when(cfg_.event_start, cfg_.event_start + cfg_.event_window);
            for (NodeId s : eligible) dets.push_back({s, when(engine_.rng())});
        }
        for (const auto& det : dets) {
            if (det.sentry >= nodes_.size()) throw Error(ErrorCode::invalid_argument, "detection at unknown node");
            record_.sentry_cover_sets[det.sentry] = nodes_[det.sentry]->cover_sets;
            Node* n = nodes_[det.sentry].get();
            engine_.schedule(std::max(det.time, engine_.now()), EventKind::app, n->id, [this, n]() { detect(*n); });
        }
        record_.detections = std::move(dets);
    }

    // --- sink beaconing -----------------------------------------------------

    void beacon() {
        const Position p = sink_position(engine_.now());
        channel_->move(sink_id_, p);
        Frame f;
        f.dst = kBroadcast;
        f.payload_bytes = kBeaconBytes;
        f.msg = BeaconMsg{++beacon_seq_, p};
        sink_mac_->enqueue(std::move(f));
        const double next = engine_.now() + cfg_.beacon_period;
        if (next <= end_time_) engine_.schedule(next, EventKind::app, sink_id_, [this]() { beacon(); });
    }

    void on_beacon(Node& n, const BeaconMsg& b, NodeId from) {
        const bool fresh = b.seq > n.beacon_seq;
        if (from == sink_id_) n.direct_seq = std::max(n.direct_seq, b.seq);
        if (fresh) {
            n.beacon_seq = b.seq;
            n.sink_pos = b.sink;
            std::uniform_real_distribution<double> jitter(0.0, cfg_.beacon_jitter);
            Node* raw = &n;
            engine_.schedule_in(jitter(engine_.rng()), EventKind::app, n.id,
                                [this, raw, b]() { broadcast(*raw, b, kBeaconBytes); });
        }
        if (n.sink_pos) n.router->set_sink(*n.sink_pos, n.direct_seq > 0 && n.direct_seq + 1 >= n.beacon_seq);
    }

    // --- detection, cover-set selection, activation -------------------------

    void detect(Node& n) {
        start_burst(n);
        std::vector<CoverSet> candidates;
        for (const auto& cs : n.cover_sets) {
            if (!cs.is_singleton_owner()) candidates.push_back(cs);
        }
        if (candidates.empty()) {
            activate(n, CoverSet{n.id, {n.id}, std::nullopt});
            return;
        }
        if (cfg_.scenario == 1) {
            activate(n, candidates.front());
            return;
        }
        const auto targets = request_targets(candidates);
        ++n.round_id;
        n.round = CoverSetInfoRound(targets, engine_.now() + cfg_.info_timeout);
        n.candidates = std::move(candidates);
        n.round_started = engine_.now();
        const Position sink = n.sink_pos.value_or(cfg_.sink_start());
        for (NodeId m : targets) unicast(n, m, InfoRequestMsg{n.round_id, sink}, kInfoBytes);
        Node* raw = &n;
        const std::uint32_t id = n.round_id;
        engine_.schedule(n.round->deadline(), EventKind::timer, n.id, [this, raw, id]() {
            if (raw->round && raw->round_id == id) close_round(*raw);
        });
    }

    void on_info_request(Node& n, const InfoRequestMsg& req, NodeId from) {
        MemberInfo info;
        info.f_size = forwarders(n.table, n.pos, req.sink).size();
        info.f2_size = forwarders2_union(n.table, n.pos, req.sink).size();
        info.residual_energy = n.energy;
        info.capture_rate = cfg_.capture_rate;
        unicast(n, from, InfoReplyMsg{req.round, info}, kInfoBytes);
    }

    void on_info_reply(Node& n, const InfoReplyMsg& rep, NodeId from) {
        if (!n.round || rep.round != n.round_id) return;
        n.round->record_reply(from, rep.info, engine_.now());
        if (n.round->all_replied()) close_round(n);
    }

    void close_round(Node& n) {
        std::vector<CoverSet> scored;
        for (auto cs : n.candidates) {
            if (!n.round->complete_for(cs)) continue;
            score_cover_set(cs, n.round->replies(), cfg_.weights, cfg_.path_factor);
            scored.push_back(std::move(cs));
        }
        n.round.reset();
        n.candidates.clear();
        activate(n, select_cover_set(n.id, scored, cfg_.energy_floor));
    }

    void activate(Node& n, CoverSet chosen) {
        for (NodeId m : chosen.members) {
            if (m != n.id) unicast(n, m, ActivateMsg{n.id}, kActivateBytes);
        }
        record_.activations.push_back({n.id, engine_.now(), std::move(chosen)});
    }

    // --- image traffic ------------------------------------------------------

    void start_burst(Node& n) {
        const double gap = cfg_.capture_rate > 0.0 ? 1.0 / cfg_.capture_rate : 0.0;
        Node* raw = &n;
        for (std::size_t k = 0; k < cfg_.images_per_burst; ++k) {
            engine_.schedule_in(gap * static_cast<double>(k), EventKind::app, n.id, [this, raw]() { capture(*raw); });
        }
    }

    void capture(Node& n) {
        const auto image = static_cast<ImageId>(images_.size());
        images_.push_back({n.id, engine_.now()});
        record_.fragments_generated += spec_frag_count_;
        for (std::uint32_t i = 0; i < spec_frag_count_; ++i) n.backlog.push_back({image, i});
        pump(n);
    }

    void pump(Node& n) {
        while (!n.backlog.empty() && n.mac->queue_size() < cfg_.source_window) {
            const BacklogItem item = n.backlog.front();
            n.backlog.pop_front();
            if (!n.sink_pos) {
                ++record_.drops.no_sink_position;
                continue;
            }
            ImageFragmentMsg msg;
            msg.fragment.image = item.image;
            msg.fragment.index = item.index;
            msg.fragment.payload_bytes = cfg_.image.payload_size;
            msg.source = n.id;
            msg.header = n.router->make_header(n_paths_);
            route(n, std::move(msg), kNoNode);
        }
    }

    void route(Node& n, ImageFragmentMsg msg, NodeId from) {
        const ForwardAction a = n.router->forward(msg.header, from);
        if (a.kind == ForwardAction::Kind::drop) {
            count_drop(a.cause);
            return;
        }
        if (a.kind == ForwardAction::Kind::deliver) return; // only the sink delivers
        ++record_.mode_hops[static_cast<std::size_t>(msg.header.mode)];
        const bool queued = unicast(n, a.next_hop, std::move(msg), cfg_.image.payload_size, [this](bool ok) {
            if (!ok) count_drop(DropCause::mac_failure);
        });
        if (!queued) count_drop(DropCause::queue_overflow);
    }

    void count_drop(DropCause c) {
        switch (c) {
        case DropCause::routing_failure: ++record_.drops.routing_failure; break;
        case DropCause::mac_failure: ++record_.drops.mac_failure; break;
        case DropCause::queue_overflow: ++record_.drops.queue_overflow; break;
        case DropCause::hop_limit: ++record_.drops.hop_limit; break;
        case DropCause::none: break;
        }
    }

    void on_frame(Node& n, const FramePtr& f) {
        std::visit(
            [&](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, HelloMsg>) {
                    n.table.add_one_hop(m.self);
                } else if constexpr (std::is_same_v<T, TableMsg>) {
                    n.table.add_one_hop(m.self);
                    n.table.set_two_hop(m.self.id, m.one_hop);
                } else if constexpr (std::is_same_v<T, BeaconMsg>) {
                    on_beacon(n, m, f->src);
                } else if constexpr (std::is_same_v<T, InfoRequestMsg>) {
                    on_info_request(n, m, f->src);
                } else if constexpr (std::is_same_v<T, InfoReplyMsg>) {
                    on_info_reply(n, m, f->src);
                } else if constexpr (std::is_same_v<T, ActivateMsg>) {
                    start_burst(n);
                } else if constexpr (std::is_same_v<T, ImageFragmentMsg>) {
                    route(n, m, f->src);
                }
            },
            f->msg);
    }

    // --- sink ---------------------------------------------------------------

    void on_sink_frame(const FramePtr& f) {
        const auto* msg = std::get_if<ImageFragmentMsg>(&f->msg);
        if (msg == nullptr) return;
        const ImageId id = msg->fragment.image;
        auto it = buffers_.find(id);
        if (it == buffers_.end()) {
            const ImageMeta& meta = images_.at(id);
            it = buffers_.emplace(id, ReassemblyBuffer(id, meta.source, spec_frag_count_, meta.capture_time,
                                                       cfg_.display_timer))
                     .first;
        }
        ReassemblyBuffer& buf = it->second;
        const bool was_started = buf.started();
        switch (buf.on_fragment(msg->fragment, engine_.now())) {
        case ReassemblyBuffer::Outcome::accepted: ++record_.fragments_delivered; break;
        case ReassemblyBuffer::Outcome::completed:
            ++record_.fragments_delivered;
            buf.finalize(engine_.now());
            break;
        case ReassemblyBuffer::Outcome::duplicate: ++record_.duplicate_fragments; break;
        case ReassemblyBuffer::Outcome::late: ++record_.late_fragments; break;
        }
        if (!was_started && !buf.finalized()) {
            engine_.schedule(*buf.deadline(), EventKind::timer, sink_id_, [this, id]() {
                auto& b = buffers_.at(id);
                if (!b.finalized()) b.finalize(engine_.now());
            });
        }
    }

    RunRecord finish() {
        const double now = engine_.now();
        record_.end_time = now;
        for (ImageId id = 0; id < images_.size(); ++id) {
            auto it = buffers_.find(id);
            if (it != buffers_.end()) {
                record_.images.push_back(it->second.finalize(now));
            } else {
                ReassemblyBuffer empty(id, images_[id].source, spec_frag_count_, images_[id].capture_time,
                                       cfg_.display_timer);
                record_.images.push_back(empty.finalize(now));
            }
        }
        record_.channel = channel_->counters();
        record_.engine = engine_.stats();
        auto add = [this](const MacCounters& c) {
            auto& s = record_.mac;
            s.enqueued += c.enqueued;
            s.queue_drops += c.queue_drops;
            s.attempts += c.attempts;
            s.retries += c.retries;
            s.channel_access_failures += c.channel_access_failures;
            s.delivered += c.delivered;
            s.failed += c.failed;
            s.acks_sent += c.acks_sent;
            s.duplicates += c.duplicates;
        };
        for (const auto& n : nodes_) add(n->mac->counters());
        add(sink_mac_->counters());
        if (now > 0.0) {
            for (NodeId i = 0; i < channel_->size(); ++i)
                record_.max_busy_fraction = std::max(record_.max_busy_fraction, channel_->busy_time(i) / now);
        }
        return std::move(record_);
    }

    ScenarioConfig cfg_;
    Engine engine_;
    std::uint32_t spec_frag_count_;
    std::uint32_t n_paths_ = 1;
    NodeId sink_id_ = kNoNode;
    std::unique_ptr<Channel> channel_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::unique_ptr<Mac> sink_mac_;
    std::uint32_t beacon_seq_ = 0;
    double end_time_ = std::numeric_limits<double>::infinity();
    std::optional<std::vector<Detection>> fixed_detections_;
    std::vector<ImageMeta> images_;
    std::map<ImageId, ReassemblyBuffer> buffers_;
    RunRecord record_;
};

} // namespace

Deployment random_deployment(const ScenarioConfig& cfg, Rng& rng) {
    Deployment d;
    std::uniform_real_distribution<double> ux(0.0, cfg.area_width);
    std::uniform_real_distribution<double> uy(0.0, cfg.area_height);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> energy(cfg.energy_min, cfg.energy_max);
    for (std::size_t i = 0; i < cfg.node_count; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        d.positions.push_back({x, y});
    }
    for (std::size_t i = 0; i < cfg.node_count; ++i) d.line_of_sight.push_back(angle(rng));
    for (std::size_t i = 0; i < cfg.node_count; ++i) d.residual_energy.push_back(energy(rng));
    return d;
}

RunRecord simulate(const ScenarioConfig& cfg, const RunOptions& options) {
    Simulation sim(cfg, options);
    return sim.run();
}

} // namespace tgpsr
