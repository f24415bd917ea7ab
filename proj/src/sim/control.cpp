#include "trl/sim/control.hpp"

#include <algorithm>
#include <cmath>

namespace trl::sim {

double lateral_control_at(const VehicleState& state, const LaneRef& lane,
                          const LaneProjection& prj, const LateralGains& gains,
                          const LateralLimits& limits) {
    double v_safe = std::max(state.v, limits.v_eps);
    // Sampling the lane heading slightly ahead compensates for the heading
    // loop's lag on curved sections; on straights it changes nothing.
    double psi_lane = lane.heading_at(prj.s + v_safe * limits.preview_time);
    double v_lat = -gains.kp_lateral * prj.lateral;
    double dpsi = std::asin(std::clamp(v_lat / v_safe, -1.0, 1.0));
    double psi_target = psi_lane + dpsi;
    double psi_rate = gains.kp_heading * wrap_angle(psi_target - state.psi);
    double delta = std::asin(std::clamp(0.5 * state.length * psi_rate / v_safe, -1.0, 1.0));
    return std::clamp(delta, -limits.delta_max, limits.delta_max);
}

double lateral_control(const VehicleState& state, const LaneRef& lane,
                       const LateralGains& gains, const LateralLimits& limits) {
    return lateral_control_at(state, lane, lane.project(state.pos()), gains, limits);
}

double idm_acceleration(double v, double dv, double gap, const IdmParams& p, double b_hard) {
    double d_d = p.d0 + p.time_gap * v + v * dv / (2.0 * std::sqrt(p.a_max * p.b_comf));
    double ratio = d_d / gap;
    double a = p.a_max * (1.0 - std::pow(v / p.v_desired, p.accel_exp) - ratio * ratio);
    return std::clamp(a, -b_hard, p.a_max);
}

}  // namespace trl::sim
