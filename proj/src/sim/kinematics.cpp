#include "trl/sim/kinematics.hpp"

#include <algorithm>

namespace trl::sim {

VehicleState step_kinematics(const VehicleState& state, const ControlCommand& cmd, double dt) {
    double v_next = std::max(0.0, state.v + cmd.accel * dt);
    double beta = std::atan(0.5 * std::tan(cmd.delta));
    double omega = 2.0 * state.v * std::sin(beta) / state.length;
    double vx = v_next * std::sin(beta + state.psi);
    double vy = v_next * std::cos(beta + state.psi);

    VehicleState next = state;
    next.v = v_next;
    next.psi = wrap_angle(state.psi + omega * dt);
    next.x = state.x + vx * dt;
    next.y = state.y + vy * dt;
    return next;
}

}  // namespace trl::sim
