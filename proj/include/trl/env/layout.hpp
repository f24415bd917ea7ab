#pragma once

#include <vector>

#include "trl/sim/lane.hpp"

namespace trl::env {

// Side a vehicle enters from. South enters heading +y, East enters heading -x,
// and so on. The horizontal (East-West) road is the main road; vehicles from
// North and South must give way.
enum class Approach { South = 0, East = 1, North = 2, West = 3 };

enum class Movement { LeftTurn = 0, Straight = 1, RightTurn = 2 };

struct Route {
    Approach approach;
    Movement movement;
    sim::LaneRef lane;
    double s_core_enter = 0.0;  // arc length where the centerline enters the conflict core
    double s_core_exit = 0.0;
    bool from_main_road = false;
};

struct LayoutConfig {
    double lane_width = 4.0;
    double approach_length = 100.0;   // centerline run-up measured to the intersection center
    double exit_length = 220.0;       // centerline run-out past the center
    double left_turn_radius = 6.0;
    double right_turn_radius = 6.0;   // must stay above the bicycle model's minimum
    double straight_step = 2.0;       // sampling on straight pieces
    double arc_step = 0.25;           // sampling on turn arcs
    double core_half_extent = 8.0;    // conflict core is the square [-c, c]^2
};

// Two-lane four-way junction under right-hand traffic. Each of the twelve
// routes is a single centerline: straight approach, quarter-circle turn arc
// tangent to both lanes (straights skip the arc), straight exit.
class RoadLayout {
public:
    explicit RoadLayout(const LayoutConfig& cfg = {});

    const Route& route(Approach a, Movement m) const;
    const std::vector<Route>& routes() const { return routes_; }
    const LayoutConfig& config() const { return cfg_; }

    static int route_index(Approach a, Movement m) { return int(a) * 3 + int(m); }

private:
    LayoutConfig cfg_;
    std::vector<Route> routes_;
};

}  // namespace trl::env
