// Small hand-placed deployments for end-to-end runs.
#pragma once

#include "oracles.hpp"
#include "tgpsr/simulation.hpp"

namespace fixture {

// Sentry 0 at the origin looking east. {1,2,3} is the three-camera cover of
// the reference layout; {4,5,6} is a second cover whose two front members
// sit further out, toward relays 7..10 and a sink at (440,0).
inline tgpsr::Deployment two_cover_layout() {
    tgpsr::Deployment d;
    d.positions = {{0, 0},    {-3, 0},    {40, 36},  {40, -36}, {-4, 1},  {60, 72},
                   {60, -72}, {190, 80},  {190, -80}, {320, 80}, {320, -80}};
    d.line_of_sight.assign(d.positions.size(), 0.0);
    d.residual_energy.assign(d.positions.size(), 100.0);
    return d;
}
inline constexpr tgpsr::Position kTwoCoverSink{440, 0};

inline oracle::Topology topology_of(const tgpsr::Deployment& d, double range) {
    oracle::Topology t;
    t.range = range;
    t.pos = d.positions;
    return t;
}

// Lone camera 100 m from the sink.
inline tgpsr::Deployment single_hop_layout() {
    tgpsr::Deployment d;
    d.positions = {{100, 0}};
    d.line_of_sight = {0.0};
    d.residual_energy = {100.0};
    return d;
}

} // namespace fixture
