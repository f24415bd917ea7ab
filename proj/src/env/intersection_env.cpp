#include "trl/env/intersection_env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trl/errors.hpp"
#include "trl/sim/control.hpp"
#include "trl/sim/kinematics.hpp"

namespace trl::env {

using sim::Vec2;
using sim::VehicleState;

const char* task_name(Task t) {
    switch (t) {
        case Task::LeftTurn: return "left";
        case Task::Straight: return "straight";
        default: return "right";
    }
}

int EnvConfig::ticks_per_decision() const {
    return int(std::lround(decision_period * sim_hz));
}

int EnvConfig::total_ticks() const {
    return int(std::lround(episode_duration * sim_hz));
}

void EnvConfig::validate() const {
    if (sim_hz <= 0.0) throw ConfigError("sim_hz must be positive");
    if (episode_duration <= 0.0) throw ConfigError("episode duration must be positive");
    if (n_vehicles < 0) throw ConfigError("vehicle count must be non-negative");
    if (n_observed < 0) throw ConfigError("observed slot count must be non-negative");
    double ticks = decision_period * sim_hz;
    if (ticks < 1.0 - 1e-9 || std::abs(ticks - std::round(ticks)) > 1e-9)
        throw ConfigError("decision period must be a whole number of ticks");
    if (total_ticks() < 1) throw ConfigError("episode shorter than one tick");
    if (pos_scale <= 0.0 || speed_scale <= 0.0) throw ConfigError("observation scales must be positive");
    if (ego_speed_cap <= 0.0) throw ConfigError("ego speed cap must be positive");
    if (start_distance <= 0.0 || start_distance >= layout.approach_length)
        throw ConfigError("ego start must lie on the approach");
    if (goal_distance <= 0.0 || goal_distance >= layout.exit_length)
        throw ConfigError("goal must lie on the exit road");
    if (goal_radius <= 0.0) throw ConfigError("goal radius must be positive");
    if (spawn_offset_min <= 0.0 || spawn_offset_min > spawn_offset_max ||
        spawn_offset_max >= layout.approach_length)
        throw ConfigError("spawn offsets must fit the approach");
    if (spawn_speed_min < 0.0 || spawn_speed_min > spawn_speed_max)
        throw ConfigError("spawn speed range is inverted");
    if (max_spawn_attempts < 1) throw ConfigError("spawn attempts must be positive");
    if (spawn_rounds < 1) throw ConfigError("spawn rounds must be positive");
    if (conflict_step <= 0.0 || conflict_horizon < conflict_step)
        throw ConfigError("conflict horizon must cover at least one step");
    if (b_hard <= 0.0) throw ConfigError("hard braking magnitude must be positive");
    if (forward_clearance <= 0.0) throw ConfigError("forward clearance must be positive");
    if (conflict_margin < 0.0) throw ConfigError("conflict margin must be non-negative");
    if (vehicle_length <= 0.0 || vehicle_width <= 0.0)
        throw ConfigError("vehicle footprint must be positive");
}

double compute_reward(bool reached_goal, bool highest_speed, bool collision) {
    if (reached_goal) return 1.0;
    return (highest_speed ? 1.0 : 0.0) - 5.0 * (collision ? 1.0 : 0.0);
}

IntersectionEnv::IntersectionEnv(EnvConfig cfg, Task task)
    : cfg_(std::move(cfg)), task_(task), layout_(cfg_.layout) {
    cfg_.validate();
    dt_ = 1.0 / cfg_.sim_hz;
    ego_route_ = RoadLayout::route_index(Approach::South, Movement(int(task_)));

    double h = 0.5 * cfg_.layout.lane_width;
    switch (task_) {
        case Task::LeftTurn: goal_ = {-cfg_.goal_distance, h}; break;
        case Task::Straight: goal_ = {h, cfg_.goal_distance}; break;
        case Task::RightTurn: goal_ = {cfg_.goal_distance, -h}; break;
    }
}

std::vector<VehicleState> IntersectionEnv::states() const {
    std::vector<VehicleState> out;
    out.reserve(cars_.size());
    for (const Car& c : cars_) out.push_back(c.st);
    return out;
}

void IntersectionEnv::spawn_surrounding(Rng& rng) {
    double min_gap = cfg_.spawn_headway + cfg_.vehicle_length;
    for (int round = 0; round < cfg_.spawn_rounds; ++round) {
        cars_.resize(1);
        // Own-route arc positions of everything placed so far, for the
        // same-lane headway check.
        std::vector<double> own_s{cfg_.layout.approach_length - cfg_.start_distance};
        std::vector<Approach> approaches{Approach::South};

        bool all_placed = true;
        for (int k = 0; k < cfg_.n_vehicles && all_placed; ++k) {
            bool placed = false;
            for (int attempt = 0; attempt < cfg_.max_spawn_attempts && !placed; ++attempt) {
                Approach a = Approach(rng.uniform_int(4));
                Movement m = Movement(rng.uniform_int(3));
                double off = rng.uniform(cfg_.spawn_offset_min, cfg_.spawn_offset_max);
                double v = rng.uniform(cfg_.spawn_speed_min, cfg_.spawn_speed_max);

                const Route& r = layout_.route(a, m);
                double s = cfg_.layout.approach_length - off;
                Vec2 p = r.lane.point_at(s);
                Car c;
                c.st = {p.x, p.y, v, r.lane.heading_at(s), cfg_.vehicle_length,
                        cfg_.vehicle_width};
                c.route = RoadLayout::route_index(a, m);
                c.v_desired = cfg_.idm.v_desired;

                bool ok = true;
                OrientedBox cb = vehicle_box(c.st);
                for (size_t e = 0; e < cars_.size() && ok; ++e) {
                    if (boxes_overlap(cb, vehicle_box(cars_[e].st))) ok = false;
                    if (ok && approaches[e] == a && std::abs(own_s[e] - s) < min_gap) ok = false;
                }
                if (ok) {
                    cars_.push_back(std::move(c));
                    own_s.push_back(s);
                    approaches.push_back(a);
                    placed = true;
                }
            }
            all_placed = placed;
        }
        if (all_placed) return;
    }
    throw EnvError("could not place surrounding traffic without overlap");
}

std::vector<double> IntersectionEnv::reset(uint64_t seed) {
    Rng rng(seed);
    cars_.clear();
    tick_ = 0;
    done_ = false;
    ego_collision_ = false;
    reached_goal_ = false;
    surr_collisions_ = 0;
    ego_distance_ = 0.0;
    started_ = true;

    const Route& er = layout_.routes()[size_t(ego_route_)];
    double s0 = cfg_.layout.approach_length - cfg_.start_distance;
    Vec2 p0 = er.lane.point_at(s0);
    Car ego;
    ego.st = {p0.x, p0.y, 0.0, er.lane.heading_at(s0), cfg_.vehicle_length, cfg_.vehicle_width};
    ego.route = ego_route_;
    cars_.push_back(ego);

    spawn_surrounding(rng);

    used_routes_.clear();
    for (const Car& c : cars_) used_routes_.push_back(c.route);
    std::sort(used_routes_.begin(), used_routes_.end());
    used_routes_.erase(std::unique(used_routes_.begin(), used_routes_.end()), used_routes_.end());

    proj_.assign(cars_.size() * 12, ProjEntry{});
    return observe();
}

void IntersectionEnv::refresh_projections(bool full) {
    for (size_t c = 0; c < cars_.size(); ++c) {
        Vec2 p = cars_[c].st.pos();
        for (int r : used_routes_) {
            ProjEntry& e = proj(c, r);
            const sim::LaneRef& lane = layout_.routes()[size_t(r)].lane;
            // Windowed search around the previous arc position, rebased by a
            // staggered full scan so stale hints cannot persist.
            bool rebase = full || !e.valid || ((tick_ + long(c) * 7 + r) % 25 == 0);
            sim::LaneProjection lp =
                rebase ? lane.project(p) : lane.project_near(p, e.s, 6.0);
            e = {lp.s, lp.lateral, lp.dist, true};
        }
    }
}

double IntersectionEnv::idm_leader_accel(size_t i) const {
    const Car& f = cars_[i];
    const Route& route = layout_.routes()[size_t(f.route)];
    double s_f = proj(i, f.route).s;

    double best_ds = 1e18;
    double leader_v_along = 0.0;
    for (size_t j = 0; j < cars_.size(); ++j) {
        if (j == i) continue;
        const ProjEntry& p = proj(j, f.route);
        if (!p.valid || std::abs(p.lateral) > cfg_.leader_lat_gate) continue;
        double ds = p.s - s_f;
        if (ds <= 0.0 || ds > cfg_.leader_range) continue;
        if (ds < best_ds) {
            best_ds = ds;
            leader_v_along =
                cars_[j].st.v * std::cos(cars_[j].st.psi - route.lane.heading_at(p.s));
        }
    }

    sim::IdmParams params = cfg_.idm;
    params.v_desired = f.v_desired;
    if (best_ds > 1e17) return sim::idm_acceleration(f.st.v, 0.0, 1e6, params, cfg_.b_hard);
    return sim::idm_acceleration(f.st.v, f.st.v - leader_v_along, best_ds, params, cfg_.b_hard);
}

// Future footprints along each surrounding car's own route on the conflict
// sample grid: fut_ assumes constant speed, fut_brk_ sustained hard braking.
// Headings follow the lane, so turning traffic is predicted through its arc
// rather than along its momentary heading, which would miss every conflict
// that begins after a curve entry.
void IntersectionEnv::sample_route_futures(int n) {
    size_t stride = size_t(n) + 1;
    fut_.assign(cars_.size() * stride, OrientedBox{});
    fut_brk_.assign(cars_.size() * stride, OrientedBox{});
    for (size_t i = 1; i < cars_.size(); ++i) {
        const Car& c = cars_[i];
        const sim::LaneRef& lane = layout_.routes()[size_t(c.route)].lane;
        double s0 = proj(i, c.route).s;
        double v = c.st.v;
        double t_stop = v / cfg_.b_hard;
        for (int k = 0; k <= n; ++k) {
            double t = k * cfg_.conflict_step;
            double tb = std::min(t, t_stop);
            double s_const = s0 + v * t;
            double s_brk = s0 + v * tb - 0.5 * cfg_.b_hard * tb * tb;
            for (int which = 0; which < 2; ++which) {
                double s = which == 0 ? s_const : s_brk;
                Vec2 p = lane.point_at(s);
                OrientedBox box{{p.x, p.y}, 0.5 * c.st.length + cfg_.conflict_margin,
                                0.5 * c.st.width + cfg_.conflict_margin, lane.heading_at(s)};
                (which == 0 ? fut_ : fut_brk_)[i * stride + size_t(k)] = box;
            }
        }
    }
}

// True when `other` sits ahead of `follower` inside the car-following
// corridor of the follower's own route. Such pairs are spaced by the
// car-following law, not by conflict prediction.
bool IntersectionEnv::in_following_corridor(size_t follower, size_t other) const {
    const Car& f = cars_[follower];
    const ProjEntry& p = proj(other, f.route);
    if (!p.valid || std::abs(p.lateral) > cfg_.leader_lat_gate) return false;
    double ds = p.s - proj(follower, f.route).s;
    return ds > 0.0 && ds <= cfg_.leader_range;
}

// True when any vehicle's current footprint sits in the short strip directly
// ahead of car i. Guards against creeping into occupied space from a
// standstill, where the constant-velocity conflict sweep sees nothing.
bool IntersectionEnv::corridor_blocked(size_t i) const {
    const Car& f = cars_[i];
    sim::Vec2 dir{std::sin(f.st.psi), std::cos(f.st.psi)};
    double reach = 0.5 * cfg_.forward_clearance;
    OrientedBox probe{{f.st.x + dir.x * (0.5 * f.st.length + reach),
                       f.st.y + dir.y * (0.5 * f.st.length + reach)},
                      reach, 0.5 * f.st.width, f.st.psi};
    for (size_t j = 0; j < cars_.size(); ++j) {
        if (j == i) continue;
        if (boxes_overlap(probe, vehicle_box(cars_[j].st))) return true;
    }
    return false;
}

bool IntersectionEnv::must_yield(size_t i) const {
    const Car& f = cars_[i];
    const Route& route = layout_.routes()[size_t(f.route)];
    if (route.from_main_road) return false;
    if (proj(i, f.route).s >= route.s_core_enter) return false;

    OrientedBox fb = swept_box(f.st, cfg_.conflict_horizon);
    for (size_t j = 1; j < cars_.size(); ++j) {
        if (j == i) continue;
        const Car& m = cars_[j];
        const Route& mr = layout_.routes()[size_t(m.route)];
        if (!mr.from_main_road) continue;
        if (proj(j, m.route).s >= mr.s_core_exit) continue;
        if (boxes_overlap(fb, swept_box(m.st, cfg_.conflict_horizon))) return true;
    }
    return false;
}

void IntersectionEnv::run_tick(double ego_accel) {
    refresh_projections(false);

    // Mutual avoidance among surrounding vehicles only; the ego must earn its
    // own safety margin. Same-corridor pairs are left to the car-following
    // law. For a predicted crossing conflict exactly one car yields: the
    // secondary road yields to the main road, otherwise whoever has more of
    // the conflict core left ahead. If the pair still overlaps against the
    // yielder's braked trajectory the other car brakes too, since its priority
    // cannot clear a conflict the yielder can no longer avoid. The static
    // corridor check stops cars from creeping into occupied space, where the
    // forward sweep is blind at zero speed.
    int n = int(std::floor(cfg_.conflict_horizon / cfg_.conflict_step + 1e-9));
    sample_route_futures(n);
    size_t stride = size_t(n) + 1;

    std::vector<char> brake(cars_.size(), 0);
    for (size_t i = 1; i < cars_.size(); ++i) {
        for (size_t j = i + 1; j < cars_.size(); ++j) {
            if (brake[i] && brake[j]) continue;
            if (in_following_corridor(i, j) || in_following_corridor(j, i)) continue;
            bool conflict = false;
            for (int k = 1; k <= n && !conflict; ++k)
                conflict = boxes_overlap(fut_[i * stride + size_t(k)],
                                         fut_[j * stride + size_t(k)]);
            if (!conflict) continue;
            const Route& ri = layout_.routes()[size_t(cars_[i].route)];
            const Route& rj = layout_.routes()[size_t(cars_[j].route)];
            size_t yielder;
            if (ri.from_main_road != rj.from_main_road) {
                yielder = ri.from_main_road ? j : i;
            } else {
                double remain_i = ri.s_core_exit - proj(i, cars_[i].route).s;
                double remain_j = rj.s_core_exit - proj(j, cars_[j].route).s;
                yielder = remain_i > remain_j ? i : j;
            }
            brake[yielder] = 1;
            size_t keeper = yielder == i ? j : i;
            bool persists = false;
            for (int k = 1; k <= n && !persists; ++k)
                persists = boxes_overlap(fut_[keeper * stride + size_t(k)],
                                         fut_brk_[yielder * stride + size_t(k)]);
            if (persists) brake[keeper] = 1;
        }
    }
    for (size_t i = 1; i < cars_.size(); ++i)
        if (!brake[i] && corridor_blocked(i)) brake[i] = 1;

    std::vector<sim::ControlCommand> cmds(cars_.size());
    {
        const Car& e = cars_[0];
        const ProjEntry& pe = proj(0, e.route);
        sim::LaneProjection lp{pe.s, pe.lateral, pe.dist};
        cmds[0] = {ego_accel,
                   sim::lateral_control_at(e.st, layout_.routes()[size_t(e.route)].lane, lp,
                                           cfg_.gains, cfg_.limits)};
    }
    for (size_t i = 1; i < cars_.size(); ++i) {
        const Car& c = cars_[i];
        double a = idm_leader_accel(i);
        if (brake[i] || must_yield(i)) a = -cfg_.b_hard;
        const ProjEntry& pe = proj(i, c.route);
        sim::LaneProjection lp{pe.s, pe.lateral, pe.dist};
        cmds[i] = {a, sim::lateral_control_at(c.st, layout_.routes()[size_t(c.route)].lane, lp,
                                              cfg_.gains, cfg_.limits)};
    }

    Vec2 before = cars_[0].st.pos();
    for (size_t i = 0; i < cars_.size(); ++i)
        cars_[i].st = sim::step_kinematics(cars_[i].st, cmds[i], dt_);
    cars_[0].st.v = std::clamp(cars_[0].st.v, 0.0, cfg_.ego_speed_cap);
    ego_distance_ += (cars_[0].st.pos() - before).norm();
    ++tick_;

    // Pairwise overlap scan; pairs among surrounding vehicles only feed the
    // diagnostics counter and do not end the episode.
    OrientedBox ego_box = vehicle_box(cars_[0].st);
    for (size_t j = 1; j < cars_.size() && !ego_collision_; ++j) {
        if (boxes_overlap(ego_box, vehicle_box(cars_[j].st))) {
            ego_collision_ = true;
            done_ = true;
        }
    }
    for (size_t i = 1; i + 1 < cars_.size(); ++i) {
        OrientedBox bi = vehicle_box(cars_[i].st);
        for (size_t j = i + 1; j < cars_.size(); ++j) {
            if (boxes_overlap(bi, vehicle_box(cars_[j].st))) ++surr_collisions_;
        }
    }

    if (!done_) {
        if ((cars_[0].st.pos() - goal_).norm() <= cfg_.goal_radius) {
            reached_goal_ = true;
            done_ = true;
        } else if (tick_ >= cfg_.total_ticks()) {
            done_ = true;
        }
    }
}

StepOutcome IntersectionEnv::step(int action) {
    if (!started_) throw std::logic_error("reset must be called before step");
    if (done_) throw std::logic_error("step called on a finished episode");
    if (action < 0 || action >= int(kEgoAccelerations.size()))
        throw std::invalid_argument("action index out of range");

    double accel = kEgoAccelerations[size_t(action)];
    int ticks = cfg_.ticks_per_decision();
    for (int t = 0; t < ticks && !done_; ++t) run_tick(accel);

    bool highest = cars_[0].st.v >= cfg_.ego_speed_cap - cfg_.highest_speed_slack;
    StepOutcome out;
    out.reward = compute_reward(reached_goal_, highest, ego_collision_);
    out.done = done_;
    out.info = {ego_collision_, reached_goal_, highest, elapsed()};
    out.observation = observe();
    return out;
}

std::vector<double> IntersectionEnv::observe() const {
    std::vector<double> obs;
    obs.reserve(size_t(observation_size()));
    const VehicleState& ego = cars_[0].st;
    obs.push_back(ego.x / cfg_.pos_scale);
    obs.push_back(ego.y / cfg_.pos_scale);
    obs.push_back(ego.vx() / cfg_.speed_scale);
    obs.push_back(ego.vy() / cfg_.speed_scale);

    // Nearest first; equal distances keep spawn order.
    std::vector<size_t> order;
    for (size_t i = 1; i < cars_.size(); ++i) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return (cars_[a].st.pos() - ego.pos()).norm_sq() <
               (cars_[b].st.pos() - ego.pos()).norm_sq();
    });

    for (int k = 0; k < cfg_.n_observed; ++k) {
        if (k < int(order.size())) {
            const VehicleState& s = cars_[order[size_t(k)]].st;
            obs.push_back(s.x / cfg_.pos_scale);
            obs.push_back(s.y / cfg_.pos_scale);
            obs.push_back(s.vx() / cfg_.speed_scale);
            obs.push_back(s.vy() / cfg_.speed_scale);
        } else {
            obs.insert(obs.end(), {0.0, 0.0, 0.0, 0.0});
        }
    }
    return obs;
}

}  // namespace trl::env
