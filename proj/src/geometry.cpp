#include "tgpsr/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

namespace tgpsr {

namespace {

double cross(Position o, Position a, Position b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Bitmask over a fixed sample vector.
using Mask = std::vector<std::uint64_t>;

Mask coverage_mask(const Triangle& t, std::span<const Position> samples) {
    Mask m((samples.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (point_in_triangle(t, samples[i])) m[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return m;
}

bool is_full(const Mask& m, std::size_t bits) {
    for (std::size_t w = 0; w < m.size(); ++w) {
        const std::size_t remaining = bits - w * 64;
        const std::uint64_t want = remaining >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << remaining) - 1);
        if ((m[w] & want) != want) return false;
    }
    return true;
}

bool any_bit(const Mask& m) {
    return std::any_of(m.begin(), m.end(), [](std::uint64_t w) { return w != 0; });
}

bool union_covers(const std::vector<const Mask*>& masks, std::size_t skip, std::size_t bits) {
    if (masks.empty()) return bits == 0;
    Mask acc(masks.front()->size(), 0);
    for (std::size_t i = 0; i < masks.size(); ++i) {
        if (i == skip) continue;
        for (std::size_t w = 0; w < acc.size(); ++w) acc[w] |= (*masks[i])[w];
    }
    return is_full(acc, bits);
}

} // namespace

void validate(const FieldOfView& fov) {
    if (!std::isfinite(fov.apex.x) || !std::isfinite(fov.apex.y) || !std::isfinite(fov.line_of_sight))
        throw Error(ErrorCode::invalid_geometry, "field of view has non-finite apex or orientation");
    if (!(fov.angle_of_view > 0.0) || !(fov.angle_of_view < std::numbers::pi))
        throw Error(ErrorCode::invalid_geometry,
                    "angle of view must lie in (0, pi), got " + std::to_string(fov.angle_of_view));
    if (!(fov.depth_of_view > 0.0) || !std::isfinite(fov.depth_of_view))
        throw Error(ErrorCode::invalid_geometry,
                    "depth of view must be positive, got " + std::to_string(fov.depth_of_view));
}

Triangle fov_triangle(const FieldOfView& fov) {
    validate(fov);
    const double half = fov.angle_of_view / 2.0;
    const double reach = fov.depth_of_view / std::cos(half);
    const Position b_off{reach * std::cos(fov.line_of_sight + half), reach * std::sin(fov.line_of_sight + half)};
    const Position c_off{reach * std::cos(fov.line_of_sight - half), reach * std::sin(fov.line_of_sight - half)};
    return {fov.apex, fov.apex + b_off, fov.apex + c_off};
}

bool point_in_triangle(const Triangle& t, Position q) {
    const double scale = distance_sq(t.p, t.b) + distance_sq(t.b, t.c) + distance_sq(t.c, t.p);
    const double eps = 1e-12 * scale;
    const double d1 = cross(t.p, t.b, q);
    const double d2 = cross(t.b, t.c, q);
    const double d3 = cross(t.c, t.p, q);
    const bool has_neg = d1 < -eps || d2 < -eps || d3 < -eps;
    const bool has_pos = d1 > eps || d2 > eps || d3 > eps;
    return !(has_neg && has_pos);
}

bool covers_point(const FieldOfView& fov, Position q) { return point_in_triangle(fov_triangle(fov), q); }

std::vector<Position> coverage_samples(const FieldOfView& target, double spacing) {
    if (!(spacing > 0.0)) throw Error(ErrorCode::invalid_argument, "sample spacing must be positive");
    const Triangle t = fov_triangle(target);
    std::vector<Position> out;
    if (std::isfinite(spacing)) {
        const double xmin = std::min({t.p.x, t.b.x, t.c.x});
        const double xmax = std::max({t.p.x, t.b.x, t.c.x});
        const double ymin = std::min({t.p.y, t.b.y, t.c.y});
        const double ymax = std::max({t.p.y, t.b.y, t.c.y});
        const auto nx = static_cast<long>(std::floor((xmax - xmin) / spacing));
        const auto ny = static_cast<long>(std::floor((ymax - ymin) / spacing));
        for (long i = 0; i <= nx; ++i) {
            for (long j = 0; j <= ny; ++j) {
                const Position q{xmin + static_cast<double>(i) * spacing, ymin + static_cast<double>(j) * spacing};
                if (point_in_triangle(t, q)) out.push_back(q);
            }
        }
    }
    out.push_back(t.p);
    out.push_back(t.b);
    out.push_back(t.c);
    out.push_back({(t.p.x + t.b.x + t.c.x) / 3.0, (t.p.y + t.b.y + t.c.y) / 3.0});
    return out;
}

bool covers_fov(std::span<const FieldOfView> candidates, const FieldOfView& target, double spacing) {
    const auto samples = coverage_samples(target, spacing);
    if (candidates.empty()) return false;
    std::vector<Triangle> tris;
    tris.reserve(candidates.size());
    for (const auto& c : candidates) tris.push_back(fov_triangle(c));
    return std::all_of(samples.begin(), samples.end(), [&](Position q) {
        return std::any_of(tris.begin(), tris.end(), [&](const Triangle& t) { return point_in_triangle(t, q); });
    });
}

std::vector<CoverSet> enumerate_cover_sets(NodeId owner, const FieldOfView& owner_fov,
                                           const std::map<NodeId, FieldOfView>& neighbor_fovs,
                                           std::size_t max_cardinality, double spacing) {
    if (max_cardinality < 1) throw Error(ErrorCode::invalid_argument, "max_cardinality must be at least 1");
    const auto samples = coverage_samples(owner_fov, spacing);
    const std::size_t bits = samples.size();

    // Neighbors that cover no sample point can never belong to a minimal set.
    std::vector<NodeId> ids;
    std::vector<Mask> masks;
    for (const auto& [id, fov] : neighbor_fovs) {
        if (id == owner) continue;
        Mask m = coverage_mask(fov_triangle(fov), samples);
        if (!any_bit(m)) continue;
        ids.push_back(id);
        masks.push_back(std::move(m));
    }

    std::vector<CoverSet> out;
    out.push_back(CoverSet{owner, {owner}, std::nullopt});

    const std::size_t n = ids.size();
    const std::size_t kmax = std::min(max_cardinality, n);
    std::vector<std::size_t> idx;
    std::vector<const Mask*> chosen;
    for (std::size_t k = 1; k <= kmax; ++k) {
        idx.resize(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            chosen.clear();
            for (std::size_t i : idx) chosen.push_back(&masks[i]);
            if (union_covers(chosen, k, bits)) {
                bool minimal = true;
                for (std::size_t drop = 0; drop < k && minimal; ++drop) {
                    if (k > 1 && union_covers(chosen, drop, bits)) minimal = false;
                }
                if (minimal) {
                    CoverSet cs{owner, {}, std::nullopt};
                    for (std::size_t i : idx) cs.members.push_back(ids[i]);
                    out.push_back(std::move(cs));
                }
            }
            // next combination in lexicographic order
            std::size_t pos = k;
            while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const CoverSet& a, const CoverSet& b) {
        if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
        return a.members < b.members;
    });
    return out;
}

} // namespace tgpsr
