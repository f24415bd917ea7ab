#pragma once

#include "trl/sim/lane.hpp"
#include "trl/sim/types.hpp"

namespace trl::sim {

// Front wheel angle that steers the vehicle back onto the lane centerline:
// the lateral offset is converted into a correction of the target heading,
// and the heading error into a yaw rate tracked through the axle geometry.
double lateral_control(const VehicleState& state, const LaneRef& lane,
                       const LateralGains& gains, const LateralLimits& limits = {});

// Same controller with the projection supplied by the caller (the environment
// caches projections between ticks).
double lateral_control_at(const VehicleState& state, const LaneRef& lane,
                          const LaneProjection& prj, const LateralGains& gains,
                          const LateralLimits& limits = {});

// Car-following acceleration. `gap` is the distance to the leader (use a large
// sentinel when the road is free), `dv` the closing speed (own minus leader).
// The result is clamped to [-b_hard, a_max].
double idm_acceleration(double v, double dv, double gap, const IdmParams& p,
                        double b_hard = 9.0);

}  // namespace trl::sim
