#include "trl/sim/lane.hpp"

#include <algorithm>
#include <stdexcept>

namespace trl::sim {

LaneRef::LaneRef(std::vector<Vec2> points) : pts_(std::move(points)) {
    if (pts_.size() < 2) throw std::invalid_argument("lane needs at least two points");
    s_.resize(pts_.size());
    s_[0] = 0.0;
    for (size_t i = 1; i < pts_.size(); ++i) {
        double seg = (pts_[i] - pts_[i - 1]).norm();
        if (seg <= 0.0) throw std::invalid_argument("lane has a zero-length segment");
        s_[i] = s_[i - 1] + seg;
    }
    heading_.resize(pts_.size());
    for (size_t i = 0; i < pts_.size(); ++i) {
        // Interior points use the chord across both neighbors so the heading
        // stays continuous through sampled arcs.
        const Vec2& a = pts_[i == 0 ? 0 : i - 1];
        const Vec2& b = pts_[i + 1 == pts_.size() ? i : i + 1];
        Vec2 d = b - a;
        heading_[i] = std::atan2(d.x, d.y);
    }
}

size_t LaneRef::segment_of(double s) const {
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    size_t i = size_t(it - s_.begin());
    if (i == 0) return 0;
    if (i >= s_.size()) return s_.size() - 2;
    return i - 1;
}

Vec2 LaneRef::point_at(double s) const {
    s = std::clamp(s, 0.0, length());
    size_t i = segment_of(s);
    double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
    return pts_[i] + (pts_[i + 1] - pts_[i]) * t;
}

double LaneRef::heading_at(double s) const {
    s = std::clamp(s, 0.0, length());
    size_t i = segment_of(s);
    double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
    return wrap_angle(heading_[i] + wrap_angle(heading_[i + 1] - heading_[i]) * t);
}

LaneProjection LaneRef::project_range(const Vec2& p, size_t first, size_t last) const {
    double best_d2 = 1e300;
    LaneProjection out;
    for (size_t i = first; i < last; ++i) {
        Vec2 d = pts_[i + 1] - pts_[i];
        double len2 = d.norm_sq();
        double t = std::clamp((p - pts_[i]).dot(d) / len2, 0.0, 1.0);
        Vec2 q = pts_[i] + d * t;
        double d2 = (p - q).norm_sq();
        if (d2 < best_d2) {
            best_d2 = d2;
            double seg_len = s_[i + 1] - s_[i];
            Vec2 tangent = d * (1.0 / seg_len);
            Vec2 right{tangent.y, -tangent.x};
            out.s = s_[i] + t * seg_len;
            out.lateral = (p - q).dot(right);
            out.dist = std::sqrt(d2);
        }
    }
    return out;
}

LaneProjection LaneRef::project(const Vec2& p) const {
    return project_range(p, 0, pts_.size() - 1);
}

LaneProjection LaneRef::project_near(const Vec2& p, double hint, double window) const {
    if (hint < 0.0) return project(p);
    size_t lo = segment_of(std::max(0.0, hint - window));
    size_t hi = segment_of(std::min(length(), hint + window)) + 1;
    return project_range(p, lo, std::min(hi, pts_.size() - 1));
}

}  // namespace trl::sim
