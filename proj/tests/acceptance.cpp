// Acceptance run: one PASS/FAIL line per criterion, details on the lines
// below it. Exit status is the number of failed criteria.
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenario_fixtures.hpp"
#include "tgpsr/config.hpp"
#include "tgpsr/experiment.hpp"
#include "tgpsr/geometry.hpp"
#include "tgpsr/metrics.hpp"
#include "tgpsr/selection.hpp"

using namespace tgpsr;
using std::numbers::pi;

namespace {

int failed = 0;

void verdict(const char* name, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    if (!ok) ++failed;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// P(X >= k), X ~ Bin(n, 1/2)
double sign_test_p(int k, int n) {
    if (n == 0) return 1.0;
    double p = 0.0;
    for (int i = k; i <= n; ++i) {
        double c = 1.0;
        for (int j = 0; j < i; ++j) c = c * (n - j) / (j + 1);
        p += c;
    }
    return p / std::pow(2.0, n);
}

struct Paired {
    int wins = 0, losses = 0, ties = 0;
    double p() const { return sign_test_p(wins, wins + losses); }
};

// wins where better(a[i], b[i]); ties excluded
template <class F>
Paired compare(const std::vector<std::optional<double>>& a, const std::vector<std::optional<double>>& b, F better) {
    Paired s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i] || !b[i]) continue;
        if (*a[i] == *b[i])
            ++s.ties;
        else if (better(*a[i], *b[i]))
            ++s.wins;
        else
            ++s.losses;
    }
    return s;
}

double mean(const std::vector<std::optional<double>>& xs) {
    double s = 0;
    int n = 0;
    for (const auto& x : xs)
        if (x) {
            s += *x;
            ++n;
        }
    return n ? s / n : std::nan("");
}

// ---- trends -----------------------------------------------------------------

struct Sweep {
    std::vector<std::optional<double>> loss, usable, ratio;
    std::size_t congested_runs = 0;
};

// two multi-member bursts whose activations fall within one display timer
bool congested(const RunRecord& r, double window) {
    std::vector<double> t;
    for (const auto& a : r.activations)
        if (a.chosen.members.size() > 1) t.push_back(a.time);
    std::sort(t.begin(), t.end());
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] - t[i - 1] < window) return true;
    return false;
}

Sweep sweep(int scenario, std::uint64_t runs) {
    auto cfg = parse_config("", {{"scenario", std::to_string(scenario)},
                                 {"runs", std::to_string(runs)},
                                 {"sentry-fraction", "1"},
                                 {"capture-rate", "2"},
                                 {"images-per-burst", "2"}});
    Sweep s;
    for (const auto& r : run_records(cfg)) {
        const auto m = aggregate(r);
        s.loss.push_back(m.avg_loss_ratio);
        s.usable.push_back(static_cast<double>(m.complete + m.usable));
        s.ratio.push_back(m.latency_ratio);
        if (congested(r, cfg.display_timer)) ++s.congested_runs;
    }
    return s;
}

void trends() {
    constexpr std::uint64_t kRuns = 30;
    const auto t0 = std::chrono::steady_clock::now();
    const Sweep s1 = sweep(1, kRuns), s2 = sweep(2, kRuns), s3 = sweep(3, kRuns);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool cong = s1.congested_runs == kRuns && s2.congested_runs == kRuns && s3.congested_runs == kRuns;
    std::printf("  sweep: 400 nodes, 2000x2000 m, all eligible cameras detect within 60 s, 2 images/burst at 2/s,"
                " seeds 1..%llu, %.1f s\n",
                static_cast<unsigned long long>(kRuns), secs);
    std::printf("  congestion (>=2 overlapping multi-member bursts): %zu/%zu/%zu of %llu runs\n", s1.congested_runs,
                s2.congested_runs, s3.congested_runs, static_cast<unsigned long long>(kRuns));

    auto lower = [](double a, double b) { return a < b; };
    auto higher = [](double a, double b) { return a > b; };

    {
        const double m1 = mean(s1.loss), m2 = mean(s2.loss), m3 = mean(s3.loss);
        const auto a = compare(s2.loss, s1.loss, lower), b = compare(s3.loss, s2.loss, lower);
        const bool ok = cong && m2 < m1 && m3 < m2 && a.p() < 0.05 && b.p() < 0.05 && secs < 600;
        verdict("T1 loss S3 < S2 < S1", ok,
                fmt("mean loss S1 %.4f S2 %.4f S3 %.4f; S2<S1 in %d/%d seeds (p=%.4g), S3<S2 in %d/%d (p=%.4g)", m1,
                    m2, m3, a.wins, a.wins + a.losses, a.p(), b.wins, b.wins + b.losses, b.p()));
    }
    {
        const double m1 = mean(s1.usable), m2 = mean(s2.usable), m3 = mean(s3.usable);
        const auto b = compare(s3.usable, s2.usable, higher);
        verdict("T2 usable images S3 >= S2 >= S1", m3 >= m2 && m2 >= m1,
                fmt("mean usable S1 %.3f S2 %.3f S3 %.3f; S3 vs S2 gain %+.1f%% (reference +20%%);"
                    " S3>S2 in %d/%d seeds",
                    m1, m2, m3, 100.0 * (m3 - m2) / m2, b.wins, b.wins + b.losses));
    }
    {
        const double m1 = mean(s1.ratio), m2 = mean(s2.ratio), m3 = mean(s3.ratio);
        verdict("T3 latency ratio S3 <= S2 <= S1", m3 <= m2 && m2 <= m1,
                fmt("mean latency_ratio S1 %.3f S2 %.3f S3 %.3f", m1, m2, m3));
    }
}

// ---- latency floor ---------------------------------------------------------

void latency_floor() {
    const double bound = 16621 * 8 / 250000.0;
    std::map<BackoffPolicy, double> lat;
    for (auto pol : {BackoffPolicy::min, BackoffPolicy::random, BackoffPolicy::max}) {
        ScenarioConfig cfg;
        cfg.sink_waypoints = {{0, 0}};
        cfg.mac.backoff = pol;
        RunOptions o;
        o.deployment = fixture::single_hop_layout();
        o.detections = std::vector<Detection>{{0, 10.0}};
        const auto m = aggregate(simulate(cfg, o));
        lat[pol] = m.mean_latency_s.value_or(-1.0);
    }
    const double lo = lat[BackoffPolicy::min], mid = lat[BackoffPolicy::random], hi = lat[BackoffPolicy::max];
    const bool ok = lo >= bound && hi <= 2.0 && mid >= lo && mid <= hi && 0.94 >= lo && 0.94 <= hi;
    verdict("latency floor", ok,
            fmt("bound %.4f s; single hop %.4f s (random backoff), band [%.4f, %.4f] s contains 0.94", bound, mid, lo,
                hi));
}

// ---- formulas --------------------------------------------------------------

oracle::Ratio ratio_mix(oracle::Ratio a, oracle::Ratio b) {
    // (a + b) / 2
    auto s = a + b;
    return {s.num, s.den * 2};
}

void formulas() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 450);
    std::uniform_int_distribution<std::size_t> size(5, 20);
    std::uniform_int_distribution<std::size_t> card(1, 4);
    std::uniform_int_distribution<int> rate(1, 4);
    std::size_t f_checks = 0, f2_checks = 0, set_checks = 0, bad = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        oracle::Topology topo;
        topo.range = 150;
        const std::size_t n = size(rng);
        for (std::size_t i = 0; i < n; ++i) topo.pos.push_back({u(rng), u(rng)});
        const Position sink{u(rng), u(rng)};

        std::map<NodeId, std::size_t> f_lib, f2_lib;
        for (NodeId v = 0; v < n; ++v) {
            const auto tab = fixture::full_table(topo, v);
            const auto f = forwarders(tab, topo.pos[v], sink);
            const auto fo = topo.F(v, sink);
            ++f_checks;
            if (std::vector<NodeId>(fo.begin(), fo.end()) != f) ++bad;
            for (NodeId w : f) {
                const auto f2 = forwarders2(tab, topo.pos[v], w, sink);
                const auto f2o = topo.F2(v, w, sink);
                ++f2_checks;
                if (std::vector<NodeId>(f2o.begin(), f2o.end()) != f2) ++bad;
            }
            f_lib[v] = f.size();
            f2_lib[v] = forwarders2_union(tab, topo.pos[v], sink).size();
        }

        // random member sets scored from library counts, checked against
        // exact ratios built from the brute-force counts
        for (int k = 0; k < 10; ++k) {
            std::vector<NodeId> all(n);
            std::iota(all.begin(), all.end(), 0u);
            std::shuffle(all.begin(), all.end(), rng);
            CoverSet cs;
            cs.owner = all[0];
            cs.members.assign(all.begin(), all.begin() + static_cast<long>(std::min(card(rng), n)));
            std::sort(cs.members.begin(), cs.members.end());
            const PathRequirement req{static_cast<double>(rate(rng)), 1.0};
            std::map<NodeId, std::size_t> paths;
            std::vector<std::int64_t> of, of2, op;
            for (NodeId w : cs.members) {
                paths[w] = nb_optimal_paths(req);
                of.push_back(static_cast<std::int64_t>(topo.F(w, sink).size()));
                of2.push_back(static_cast<std::int64_t>(topo.F2(w, sink).size()));
                op.push_back(static_cast<std::int64_t>(std::max(1.0, std::ceil(req.capture_rate))));
            }
            const double r2 = r_2hop(cs, f2_lib, paths);
            const double rr = r_relay(cs, f_lib, f2_lib);
            const double t = tq({0.5, 0.5}, r2, rr);
            const auto e2 = oracle::r2hop(of2, op), er = oracle::rrelay(of, of2);
            const double want[] = {e2.value(), er.value(), ratio_mix(e2, er).value()};
            const double got[] = {r2, rr, t};
            for (int i = 0; i < 3; ++i) {
                const double rel = std::abs(got[i] - want[i]) / std::max(1.0, std::abs(want[i]));
                worst = std::max(worst, rel);
                if (rel > 1e-12) ++bad;
            }
            ++set_checks;
        }
    }
    verdict("formula oracle", bad == 0,
            fmt("200 topologies: %zu F, %zu F2, %zu member sets (R_2hop, R_relay, TQ); %zu mismatches, worst rel %.2e",
                f_checks, f2_checks, set_checks, bad, worst));
}

// ---- routing -----------------------------------------------------------------

void routing() {
    std::mt19937_64 rng(77);
    std::size_t sent = 0, delivered = 0, crossings = 0, edges_checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = oracle::connected_topology(rng, 40, 600, 150);
        const NodeId sink = std::uniform_int_distribution<NodeId>(0, 39)(rng);

        std::vector<std::pair<NodeId, NodeId>> edges;
        for (NodeId v = 0; v < t.pos.size(); ++v) {
            NeighborPositions nb;
            for (NodeId w : t.nbrs(v)) nb[w] = t.pos[w];
            for (NodeId w : gabriel_planarize(v, t.pos[v], nb).planar_neighbors)
                if (v < w) edges.emplace_back(v, w);
        }
        for (std::size_t i = 0; i < edges.size(); ++i)
            for (std::size_t j = i + 1; j < edges.size(); ++j) {
                const auto [a, b] = edges[i];
                const auto [c, d] = edges[j];
                if (a == c || a == d || b == c || b == d) continue;
                ++edges_checked;
                if (oracle::segments_cross(t.pos[a], t.pos[b], t.pos[c], t.pos[d])) ++crossings;
            }

        for (Protocol p : {Protocol::gpsr, Protocol::tgpsr}) {
            fixture::Network net(t, sink, p, 2);
            for (NodeId s = 0; s < t.pos.size(); ++s) {
                if (s == sink) continue;
                ++sent;
                const auto tr = net.send(s);
                if (tr.delivered && !tr.bad_link) ++delivered;
            }
        }
    }
    verdict("routing delivery", delivered == sent && crossings == 0,
            fmt("100 topologies x 2 protocols: %zu/%zu delivered; %zu crossing Gabriel edge pairs of %zu", delivered,
                sent, crossings, edges_checked));
}

// ---- fixtures ----------------------------------------------------------------

void fixtures() {
    auto fov = [](double x, double y) { return FieldOfView{{x, y}, 0.0, pi / 3, 125.0}; };
    const std::map<NodeId, FieldOfView> nb{{1, fov(-3, 0)}, {2, fov(40, 36)}, {3, fov(40, -36)}};
    const auto sets = enumerate_cover_sets(0, fov(0, 0), nb, 4, std::numeric_limits<double>::infinity());
    const bool fig2 = sets.size() == 2 && sets[0].members == std::vector<NodeId>{0} &&
                      sets[1].members == std::vector<NodeId>{1, 2, 3};
    std::string co = "{";
    for (const auto& s : sets) {
        co += "{";
        for (NodeId m : s.members) co += (m == 0 ? std::string("V") : "V" + std::to_string(m)) + ",";
        if (co.back() == ',') co.pop_back();
        co += "},";
    }
    if (co.back() == ',') co.pop_back();
    co += "}";

    // v=0 heading for a distant sink; w=1 and u=2 ahead, m=3 and n=4 beyond
    oracle::Topology t;
    t.range = 150;
    t.pos = {{0, 0}, {80, 80}, {80, -80}, {200, 90}, {190, -95}, {-80, 0}};
    const Position sink{1000, 0};
    const auto tab = fixture::full_table(t, 0);
    const auto one = tgpsr_select_paths(tab, t.pos[0], sink, 1);
    const auto two = tgpsr_select_paths(tab, t.pos[0], sink, 2);
    const bool fig3 = one == std::vector<PathPair>{{1, 3}} && two == std::vector<PathPair>{{1, 3}, {2, 4}} &&
                      forwarders(tab, t.pos[0], sink) == std::vector<NodeId>{1, 2} &&
                      forwarders2(tab, t.pos[0], 1, sink) == std::vector<NodeId>{3};
    verdict("fixtures", fig2 && fig3,
            fmt("Co(V) = %s; pair (w, m) = (%u, %u)", co.c_str(), one.empty() ? 0u : one[0].relay,
                one.empty() ? 0u : one[0].temp_dest));
}

// ---- determinism -------------------------------------------------------------

void determinism() {
    bool same = true;
    std::size_t bytes = 0;
    for (int sc : {1, 2, 3}) {
        const auto cfg = parse_config("", {{"scenario", std::to_string(sc)}, {"runs", "2"}, {"seed", "11"}});
        const auto first = to_csv(run_experiment(cfg));
        bytes += first.size();
        for (int k = 0; k < 2; ++k) same = same && to_csv(run_experiment(cfg)) == first;
    }
    verdict("determinism", same, fmt("3 replays of each scenario, %zu csv bytes per replay set", bytes));
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void()>>> all = {
        {"fixtures", fixtures},       {"formulas", formulas}, {"routing", routing},
        {"latency", latency_floor},   {"determinism", determinism}, {"trends", trends},
    };
    for (const auto& [name, run] : all) {
        try {
            run();
        } catch (const std::exception& e) {
            verdict(name, false, std::string("threw: ") + e.what());
        }
        std::fflush(stdout);
    }
    std::printf("%d criterion(s) failed\n", failed);
    return failed;
}
