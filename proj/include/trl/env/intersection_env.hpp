#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "trl/env/geometry.hpp"
#include "trl/env/layout.hpp"
#include "trl/rng.hpp"
#include "trl/sim/types.hpp"

namespace trl::env {

// Maneuver the ego vehicle has to complete. It always enters from the South
// (secondary) approach.
enum class Task { LeftTurn = 0, Straight = 1, RightTurn = 2 };

const char* task_name(Task t);

struct EnvConfig {
    double sim_hz = 20.0;
    double episode_duration = 15.0;  // s
    int n_vehicles = 15;             // surrounding vehicles, ego excluded
    double decision_period = 1.0;    // s between ego action changes
    int n_observed = 15;             // surrounding slots in the observation

    double pos_scale = 100.0;   // m, observation normalization
    double speed_scale = 20.0;  // m/s

    double ego_speed_cap = 12.0;     // m/s
    double highest_speed_slack = 0.5;  // reward bonus band below the cap
    // Short enough that one right-of-way wait still leaves time to finish
    // inside the episode; spawned traffic can sit on either side of the start.
    double start_distance = 25.0;    // m from the center along the approach
    double goal_distance = 25.0;     // m past the center along the exit road
    double goal_radius = 3.0;        // m

    double spawn_offset_min = 15.0;  // m from the center
    double spawn_offset_max = 80.0;
    double spawn_speed_min = 5.0;  // m/s
    double spawn_speed_max = 12.0;
    double spawn_headway = 7.0;  // m, extra same-lane spacing beyond one car length
    int max_spawn_attempts = 1000;
    // A near-capacity arrangement can dead-end; the whole packing is then
    // redrawn from the continuing seed stream this many times before giving up.
    int spawn_rounds = 25;

    double conflict_horizon = 3.0;  // s
    double conflict_step = 0.25;    // s
    double b_hard = 9.0;            // m/s^2, emergency braking magnitude
    double leader_lat_gate = 2.0;   // m, half-width of the car-following corridor
    double leader_range = 100.0;    // m, how far ahead a leader is looked for
    double forward_clearance = 4.0; // m, space a surrounding car keeps to any blocker ahead
    // Predicted footprints are grown by this much per side to absorb lane
    // tracking error on the turn arcs and the gaps between time samples.
    double conflict_margin = 0.6;   // m

    double vehicle_length = 5.0;  // m
    double vehicle_width = 2.0;

    // Stiffer than the controller's generic defaults so the turn arcs are
    // tracked within the lane at the capped ego speed.
    sim::LateralGains gains{5.0, 0.8};
    sim::LateralLimits limits{sim::kPi / 3.0, 0.1, 0.15};
    // Surrounding traffic targets the same 12 m/s limit as the ego cap, so a
    // merged ego can hold its top speed without inevitably catching a slower
    // stream; v_desired applies to surrounding vehicles.
    sim::IdmParams idm{6.0, 3.0, 1.5, 7.0, 4.0, 12.0};
    LayoutConfig layout;

    int ticks_per_decision() const;
    int total_ticks() const;
    void validate() const;  // throws ConfigError
};

inline constexpr std::array<double, 3> kEgoAccelerations{-5.0, 0.0, 5.0};

double compute_reward(bool reached_goal, bool highest_speed, bool collision);

struct StepInfo {
    bool collision = false;      // ego hit something this step
    bool reached_goal = false;
    bool highest_speed = false;  // ego speed near the cap when the reward fired
    double elapsed = 0.0;        // s since reset
};

struct StepOutcome {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

// Four-way junction episode. The ego vehicle (index 0) follows its task route
// laterally and picks one of three longitudinal accelerations per decision;
// surrounding vehicles follow random routes under car-following control plus
// hard braking on predicted conflicts, with the secondary road yielding to
// the main road.
class IntersectionEnv {
public:
    IntersectionEnv(EnvConfig cfg, Task task);

    std::vector<double> reset(uint64_t seed);
    StepOutcome step(int action);

    bool done() const { return done_; }
    int observation_size() const { return 4 * (1 + cfg_.n_observed); }
    Task task() const { return task_; }
    const EnvConfig& config() const { return cfg_; }
    const RoadLayout& layout() const { return layout_; }

    const sim::VehicleState& ego() const { return cars_[0].st; }
    std::vector<sim::VehicleState> states() const;
    sim::Vec2 goal_point() const { return goal_; }
    double elapsed() const { return tick_ * dt_; }
    double ego_distance() const { return ego_distance_; }
    long surrounding_collision_pairs() const { return surr_collisions_; }

private:
    struct Car {
        sim::VehicleState st;
        int route = -1;
        double v_desired = 10.0;
    };

    struct ProjEntry {
        double s = -1.0;
        double lateral = 0.0;
        double dist = 1e9;
        bool valid = false;
    };

    EnvConfig cfg_;
    Task task_;
    RoadLayout layout_;
    sim::Vec2 goal_;
    int ego_route_ = 0;

    std::vector<Car> cars_;
    std::vector<int> used_routes_;
    std::vector<ProjEntry> proj_;  // cars x routes
    std::vector<OrientedBox> fut_;      // cars x conflict samples, constant speed
    std::vector<OrientedBox> fut_brk_;  // same grid under sustained hard braking
    long tick_ = 0;
    double dt_ = 0.05;
    bool started_ = false;
    bool done_ = false;
    bool ego_collision_ = false;
    bool reached_goal_ = false;
    long surr_collisions_ = 0;
    double ego_distance_ = 0.0;

    ProjEntry& proj(size_t car, int route) { return proj_[car * 12 + size_t(route)]; }
    const ProjEntry& proj(size_t car, int route) const { return proj_[car * 12 + size_t(route)]; }
    void refresh_projections(bool full);
    void sample_route_futures(int n);
    sim::ControlCommand surrounding_command(size_t i) const;
    double idm_leader_accel(size_t i) const;
    bool must_yield(size_t i) const;
    bool in_following_corridor(size_t follower, size_t other) const;
    bool corridor_blocked(size_t i) const;
    void run_tick(double ego_accel);
    std::vector<double> observe() const;
    void spawn_surrounding(Rng& rng);
};

}  // namespace trl::env
