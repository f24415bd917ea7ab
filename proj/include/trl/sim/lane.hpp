#pragma once

#include <vector>

#include "trl/sim/types.hpp"

namespace trl::sim {

struct LaneProjection {
    double s = 0.0;        // arc length of the closest centerline point
    double lateral = 0.0;  // signed offset, positive to the right of travel
    double dist = 0.0;     // unsigned distance to the centerline
};

// Polyline lane centerline with arc-length lookup and point projection.
class LaneRef {
public:
    LaneRef() = default;
    explicit LaneRef(std::vector<Vec2> points);

    double length() const { return s_.empty() ? 0.0 : s_.back(); }
    Vec2 point_at(double s) const;
    double heading_at(double s) const;

    LaneProjection project(const Vec2& p) const;
    // Restricts the search to segments within `window` meters of arc length
    // `hint`. A negative hint falls back to the full scan.
    LaneProjection project_near(const Vec2& p, double hint, double window) const;

    const std::vector<Vec2>& points() const { return pts_; }

private:
    std::vector<Vec2> pts_;
    std::vector<double> s_;        // cumulative arc length, strictly increasing
    std::vector<double> heading_;  // tangent heading per point
    size_t segment_of(double s) const;
    LaneProjection project_range(const Vec2& p, size_t first, size_t last) const;
};

}  // namespace trl::sim
