#pragma once

#include <array>
#include <vector>

#include "trl/sim/types.hpp"

namespace trl::env {

// Rectangle centered at `center`, long axis along `heading` (same compass
// convention as vehicle headings).
struct OrientedBox {
    sim::Vec2 center;
    double half_length = 0.0;
    double half_width = 0.0;
    double heading = 0.0;

    sim::Vec2 long_axis() const { return {std::sin(heading), std::cos(heading)}; }
    sim::Vec2 lat_axis() const { return {std::cos(heading), -std::sin(heading)}; }
    std::array<sim::Vec2, 4> corners() const;
};

OrientedBox vehicle_box(const sim::VehicleState& s);

// Rectangle covering the vehicle swept along its current velocity for
// `horizon` seconds (exact for straight-line motion).
OrientedBox swept_box(const sim::VehicleState& s, double horizon);

// Separating axis test on the two rectangles' four edge normals.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

struct CollisionCheck {
    bool collided = false;
    int first = -1;
    int second = -1;
};

// First overlapping pair in index order, so pairs involving vehicle 0 are
// reported before any other.
CollisionCheck detect_collision(const std::vector<sim::VehicleState>& states);

// True when constant-velocity extrapolation brings the two footprints into
// overlap at any multiple of `step` up to and including `horizon`.
bool predict_conflict(const sim::VehicleState& a, const sim::VehicleState& b,
                      double horizon = 3.0, double step = 0.25);

}  // namespace trl::env
