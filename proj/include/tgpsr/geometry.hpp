#pragma once

#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "tgpsr/types.hpp"

namespace tgpsr {

/// Camera field of view. The covered region is the closed triangle (p, b, c)
/// with p at the apex and bc perpendicular to the line of sight at
/// depth_of_view from p.
struct FieldOfView {
    Position apex;
    double line_of_sight = 0.0;                    // radians, bisector orientation
    double angle_of_view = std::numbers::pi / 3.0; // radians, full aperture
    double depth_of_view = 125.0;                  // meters
};

struct Triangle {
    Position p;
    Position b;
    Position c;
};

inline constexpr double kDefaultSampleSpacing = 5.0;
inline constexpr std::size_t kDefaultMaxCardinality = 4;

/// Throws Error(invalid_geometry) for a degenerate aperture or depth.
void validate(const FieldOfView& fov);

Triangle fov_triangle(const FieldOfView& fov);

bool point_in_triangle(const Triangle& t, Position q);
bool covers_point(const FieldOfView& fov, Position q);

/// Deterministic coverage sample of the target triangle: the lattice of pitch
/// `spacing` anchored at the triangle's bounding-box minimum corner, clipped to
/// the triangle, followed by the three vertices and the centroid. An infinite
/// spacing yields only the vertices and the centroid.
std::vector<Position> coverage_samples(const FieldOfView& target, double spacing);

bool covers_fov(std::span<const FieldOfView> candidates, const FieldOfView& target,
                double spacing = kDefaultSampleSpacing);

struct CoverSetScore {
    double r2hop = 0.0;
    double rrelay = 0.0;
    double tq = 0.0;
    double min_residual_energy = 0.0;
};

struct CoverSet {
    NodeId owner = kNoNode;
    std::vector<NodeId> members; // sorted ascending
    std::optional<CoverSetScore> score;

    bool is_singleton_owner() const { return members.size() == 1 && members.front() == owner; }
};

/// Every minimal covering subset of the neighbors with at most
/// `max_cardinality` members, plus {owner}. Ordered by cardinality, then
/// lexicographically by member ids.
std::vector<CoverSet> enumerate_cover_sets(NodeId owner, const FieldOfView& owner_fov,
                                           const std::map<NodeId, FieldOfView>& neighbor_fovs,
                                           std::size_t max_cardinality = kDefaultMaxCardinality,
                                           double spacing = kDefaultSampleSpacing);

} // namespace tgpsr
