#pragma once

#include "trl/sim/types.hpp"

namespace trl::sim {

// Advances one vehicle by dt under the bicycle model. The slip angle and yaw
// rate use the pre-update speed; the position update uses the post-update
// speed with the pre-update heading.
VehicleState step_kinematics(const VehicleState& state, const ControlCommand& cmd, double dt);

}  // namespace trl::sim
