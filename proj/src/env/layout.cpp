#include "trl/env/layout.hpp"

#include <cmath>
#include <stdexcept>

namespace trl::env {

using sim::Vec2;

namespace {

void append_point(std::vector<Vec2>& pts, const Vec2& p) {
    if (!pts.empty() && (p - pts.back()).norm() < 1e-9) return;
    pts.push_back(p);
}

void append_line(std::vector<Vec2>& pts, const Vec2& a, const Vec2& b, double step) {
    double len = (b - a).norm();
    int n = std::max(1, int(std::ceil(len / step)));
    for (int i = 0; i <= n; ++i) append_point(pts, a + (b - a) * (double(i) / n));
}

// Arc around `center` from angle `a0` to `a1` (radians, CCW positive).
void append_arc(std::vector<Vec2>& pts, const Vec2& center, double radius, double a0,
                double a1, double step) {
    double span = a1 - a0;
    int n = std::max(2, int(std::ceil(std::abs(span) * radius / step)));
    for (int i = 0; i <= n; ++i) {
        double a = a0 + span * (double(i) / n);
        append_point(pts, center + Vec2{std::cos(a), std::sin(a)} * radius);
    }
}

// Canonical South-approach centerlines (entry heading +y, entry lane x = w/2).
// The other approaches are these rotated by multiples of 90 degrees.
std::vector<Vec2> canonical_points(Movement m, const LayoutConfig& c) {
    double h = 0.5 * c.lane_width;
    std::vector<Vec2> pts;
    switch (m) {
        case Movement::Straight:
            append_line(pts, {h, -c.approach_length}, {h, c.exit_length}, c.straight_step);
            break;
        case Movement::LeftTurn: {
            // Tangent points: (h, h - r) on the entry lane, (h - r, h) on the
            // westbound exit lane; arc center (h - r, h - r).
            double r = c.left_turn_radius;
            append_line(pts, {h, -c.approach_length}, {h, h - r}, c.straight_step);
            append_arc(pts, {h - r, h - r}, r, 0.0, 0.5 * sim::kPi, c.arc_step);
            append_line(pts, {h - r, h}, {-c.exit_length, h}, c.straight_step);
            break;
        }
        case Movement::RightTurn: {
            double r = c.right_turn_radius;
            append_line(pts, {h, -c.approach_length}, {h, -h - r}, c.straight_step);
            append_arc(pts, {h + r, -h - r}, r, sim::kPi, 0.5 * sim::kPi, c.arc_step);
            append_line(pts, {h + r, -h}, {c.exit_length, -h}, c.straight_step);
            break;
        }
    }
    return pts;
}

// 90-degree CCW rotations; k = int(approach) maps South to each entry side
// while preserving the right-hand lane assignment.
Vec2 rotate(const Vec2& p, int k) {
    switch (k & 3) {
        case 0: return p;
        case 1: return {-p.y, p.x};
        case 2: return {-p.x, -p.y};
        default: return {p.y, -p.x};
    }
}

}  // namespace

RoadLayout::RoadLayout(const LayoutConfig& cfg) : cfg_(cfg) {
    // sin(beta) = l / (2 r) caps the bicycle model's curvature; a 5 m
    // wheelbase needs r >= 2.5 m before any steering margin.
    if (cfg_.right_turn_radius < 3.0 || cfg_.left_turn_radius < 3.0)
        throw std::invalid_argument("turn radius too tight for the vehicle kinematics");
    if (cfg_.approach_length <= cfg_.core_half_extent ||
        cfg_.exit_length <= cfg_.core_half_extent)
        throw std::invalid_argument("approach and exit must extend past the conflict core");

    for (int a = 0; a < 4; ++a) {
        for (int m = 0; m < 3; ++m) {
            std::vector<Vec2> pts = canonical_points(Movement(m), cfg_);
            for (Vec2& p : pts) p = rotate(p, a);

            Route r;
            r.approach = Approach(a);
            r.movement = Movement(m);
            r.lane = sim::LaneRef(std::move(pts));
            r.from_main_road = (r.approach == Approach::East || r.approach == Approach::West);

            const auto& lane_pts = r.lane.points();
            double c = cfg_.core_half_extent;
            bool entered = false;
            r.s_core_enter = r.lane.length();
            r.s_core_exit = r.lane.length();
            double s = 0.0;
            for (size_t i = 0; i < lane_pts.size(); ++i) {
                if (i > 0) s += (lane_pts[i] - lane_pts[i - 1]).norm();
                bool inside = std::abs(lane_pts[i].x) <= c && std::abs(lane_pts[i].y) <= c;
                if (inside && !entered) {
                    r.s_core_enter = s;
                    entered = true;
                }
                if (inside) r.s_core_exit = s;
            }
            routes_.push_back(std::move(r));
        }
    }
}

const Route& RoadLayout::route(Approach a, Movement m) const {
    return routes_[size_t(route_index(a, m))];
}

}  // namespace trl::env
