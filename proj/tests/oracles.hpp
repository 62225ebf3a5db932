// Independent recomputations used to check the library. Nothing in here
// calls into the code under test except plain data types.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "tgpsr/types.hpp"

namespace oracle {

using tgpsr::NodeId;
using tgpsr::Position;

struct Tri {
    Position a, b, c;
};

inline Tri fov_tri(Position apex, double los, double aov, double dov) {
    const double r = dov / std::cos(aov / 2);
    return {apex,
            {apex.x + r * std::cos(los + aov / 2), apex.y + r * std::sin(los + aov / 2)},
            {apex.x + r * std::cos(los - aov / 2), apex.y + r * std::sin(los - aov / 2)}};
}

// Barycentric coordinates, closed triangle with a small relative slack.
inline bool inside(const Tri& t, Position q, double slack = 1e-9) {
    const double det = (t.b.y - t.c.y) * (t.a.x - t.c.x) + (t.c.x - t.b.x) * (t.a.y - t.c.y);
    const double l1 = ((t.b.y - t.c.y) * (q.x - t.c.x) + (t.c.x - t.b.x) * (q.y - t.c.y)) / det;
    const double l2 = ((t.c.y - t.a.y) * (q.x - t.c.x) + (t.a.x - t.c.x) * (q.y - t.c.y)) / det;
    const double l3 = 1.0 - l1 - l2;
    return l1 >= -slack && l2 >= -slack && l3 >= -slack;
}

// Lattice anchored at the bounding-box minimum plus vertices and centroid.
inline std::vector<Position> samples(const Tri& t, double pitch) {
    std::vector<Position> out;
    if (std::isfinite(pitch)) {
        const double x0 = std::min({t.a.x, t.b.x, t.c.x}), x1 = std::max({t.a.x, t.b.x, t.c.x});
        const double y0 = std::min({t.a.y, t.b.y, t.c.y}), y1 = std::max({t.a.y, t.b.y, t.c.y});
        for (long i = 0; x0 + i * pitch <= x1; ++i)
            for (long j = 0; y0 + j * pitch <= y1; ++j) {
                const Position q{x0 + i * pitch, y0 + j * pitch};
                if (inside(t, q, 1e-12)) out.push_back(q);
            }
    }
    out.push_back(t.a);
    out.push_back(t.b);
    out.push_back(t.c);
    out.push_back({(t.a.x + t.b.x + t.c.x) / 3, (t.a.y + t.b.y + t.c.y) / 3});
    return out;
}

inline bool covered(const std::vector<Tri>& by, const Tri& target, double pitch) {
    if (by.empty()) return false;
    for (const auto& q : samples(target, pitch)) {
        bool hit = false;
        for (const auto& t : by) hit = hit || inside(t, q);
        if (!hit) return false;
    }
    return true;
}

// Every minimal covering subset of `cands` (indices) up to max_card.
inline std::vector<std::vector<int>> minimal_covers(const std::vector<Tri>& cands, const Tri& target, double pitch,
                                                    std::size_t max_card) {
    std::vector<std::vector<int>> covers;
    const int n = static_cast<int>(cands.size());
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > max_card) continue;
        std::vector<int> idx;
        std::vector<Tri> ts;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                idx.push_back(i);
                ts.push_back(cands[i]);
            }
        if (!covered(ts, target, pitch)) continue;
        bool minimal = true;
        for (std::size_t k = 0; k < ts.size() && minimal; ++k) {
            auto less = ts;
            less.erase(less.begin() + static_cast<long>(k));
            if (covered(less, target, pitch)) minimal = false;
        }
        if (minimal) covers.push_back(idx);
    }
    return covers;
}

// ---- neighborhoods from raw positions --------------------------------------

struct Topology {
    std::vector<Position> pos;
    double range = 150.0;

    bool linked(NodeId a, NodeId b) const {
        return a != b && std::hypot(pos[a].x - pos[b].x, pos[a].y - pos[b].y) <= range;
    }
    std::vector<NodeId> nbrs(NodeId v) const {
        std::vector<NodeId> out;
        for (NodeId u = 0; u < pos.size(); ++u)
            if (linked(v, u)) out.push_back(u);
        return out;
    }
    double d(NodeId a, Position s) const { return std::hypot(pos[a].x - s.x, pos[a].y - s.y); }

    std::set<NodeId> F(NodeId v, Position sink) const {
        std::set<NodeId> out;
        for (NodeId u : nbrs(v))
            if (d(u, sink) < d(v, sink)) out.insert(u);
        return out;
    }
    std::set<NodeId> F2(NodeId v, NodeId u, Position sink) const {
        std::set<NodeId> out;
        for (NodeId k : nbrs(u))
            if (k != v && d(k, sink) < d(u, sink)) out.insert(k);
        return out;
    }
    std::set<NodeId> F2(NodeId v, Position sink) const {
        std::set<NodeId> out;
        for (NodeId u : F(v, sink))
            for (NodeId k : F2(v, u, sink)) out.insert(k);
        return out;
    }
};

struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;
    Ratio operator+(Ratio o) const {
        Ratio r{num * o.den + o.num * den, den * o.den};
        const auto g = std::gcd(r.num, r.den);
        if (g > 1) {
            r.num /= g;
            r.den /= g;
        }
        return r;
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// mean of f2/paths and of f/f2 (0 when f2 = 0), exact
inline Ratio r2hop(const std::vector<std::int64_t>& f2, const std::vector<std::int64_t>& paths) {
    Ratio s;
    for (std::size_t i = 0; i < f2.size(); ++i) s = s + Ratio{f2[i], paths[i]};
    return Ratio{s.num, s.den * static_cast<std::int64_t>(f2.size())};
}

inline Ratio rrelay(const std::vector<std::int64_t>& f, const std::vector<std::int64_t>& f2) {
    Ratio s;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f2[i] != 0) s = s + Ratio{f[i], f2[i]};
    return Ratio{s.num, s.den * static_cast<std::int64_t>(f.size())};
}

inline bool rel_close(double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---- planarity ---------------------------------------------------------------

inline double cross(Position o, Position a, Position b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Proper crossing of two segments that share no endpoint.
inline bool segments_cross(Position p1, Position p2, Position q1, Position q2) {
    const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

// Random connected unit-disk graph (rejection sampling).
inline Topology connected_topology(std::mt19937_64& rng, std::size_t n, double side, double range) {
    std::uniform_real_distribution<double> u(0.0, side);
    for (;;) {
        Topology t;
        t.range = range;
        for (std::size_t i = 0; i < n; ++i) t.pos.push_back({u(rng), u(rng)});
        std::vector<bool> seen(n, false);
        std::vector<NodeId> stack{0};
        seen[0] = true;
        std::size_t count = 0;
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            ++count;
            for (NodeId w : t.nbrs(v))
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
        if (count == n) return t;
    }
}

} // namespace oracle
