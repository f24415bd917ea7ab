#include "trl/env/geometry.hpp"

#include <cmath>

namespace trl::env {

std::array<sim::Vec2, 4> OrientedBox::corners() const {
    sim::Vec2 u = long_axis() * half_length;
    sim::Vec2 w = lat_axis() * half_width;
    return {center + u + w, center + u - w, center - u - w, center - u + w};
}

OrientedBox vehicle_box(const sim::VehicleState& s) {
    return {{s.x, s.y}, 0.5 * s.length, 0.5 * s.width, s.psi};
}

OrientedBox swept_box(const sim::VehicleState& s, double horizon) {
    double travel = s.v * horizon;
    sim::Vec2 mid = {s.x + 0.5 * travel * std::sin(s.psi), s.y + 0.5 * travel * std::cos(s.psi)};
    return {mid, 0.5 * s.length + 0.5 * travel, 0.5 * s.width, s.psi};
}

static bool separated_on(const sim::Vec2& axis, const OrientedBox& a, const OrientedBox& b) {
    double ca = axis.dot(a.center);
    double cb = axis.dot(b.center);
    double ra = a.half_length * std::abs(axis.dot(a.long_axis())) +
                a.half_width * std::abs(axis.dot(a.lat_axis()));
    double rb = b.half_length * std::abs(axis.dot(b.long_axis())) +
                b.half_width * std::abs(axis.dot(b.lat_axis()));
    return std::abs(ca - cb) > ra + rb;
}

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
    // The distance prefilter may only reject; the slack keeps exact corner
    // contact inside the SAT path despite rounding in `reach`.
    double reach = std::hypot(a.half_length, a.half_width) + std::hypot(b.half_length, b.half_width);
    if ((a.center - b.center).norm_sq() > reach * reach * (1.0 + 1e-12)) return false;
    return !separated_on(a.long_axis(), a, b) && !separated_on(a.lat_axis(), a, b) &&
           !separated_on(b.long_axis(), a, b) && !separated_on(b.lat_axis(), a, b);
}

CollisionCheck detect_collision(const std::vector<sim::VehicleState>& states) {
    for (size_t i = 0; i + 1 < states.size(); ++i) {
        OrientedBox bi = vehicle_box(states[i]);
        for (size_t j = i + 1; j < states.size(); ++j) {
            if (boxes_overlap(bi, vehicle_box(states[j]))) {
                return {true, int(i), int(j)};
            }
        }
    }
    return {};
}

bool predict_conflict(const sim::VehicleState& a, const sim::VehicleState& b,
                      double horizon, double step) {
    sim::Vec2 va{a.vx(), a.vy()};
    sim::Vec2 vb{b.vx(), b.vy()};
    OrientedBox box_a = vehicle_box(a);
    OrientedBox box_b = vehicle_box(b);
    int n = int(std::floor(horizon / step + 1e-9));
    for (int k = 1; k <= n; ++k) {
        double t = k * step;
        OrientedBox pa = box_a;
        OrientedBox pb = box_b;
        pa.center = box_a.center + va * t;
        pb.center = box_b.center + vb * t;
        if (boxes_overlap(pa, pb)) return true;
    }
    return false;
}

}  // namespace trl::env
