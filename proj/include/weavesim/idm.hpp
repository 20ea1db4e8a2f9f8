#pragma once

#include "weavesim/road.hpp"

namespace weave {

/// Infinite-gap sentinel accepted by the car-following functions.
inline constexpr double kNoLeader = 1e300;

/// Intelligent Driver Model acceleration for a bumper-to-bumper gap to the
/// leader. `gap >= kNoLeader` means free road. Result is clamped to
/// [-phys_decel, params.max_accel].
/// Throws DomainError on non-finite speeds or non-positive gap.
double idm_acceleration(double ego_speed, double gap, double leader_speed,
                        const DriverParams& params, double phys_decel = 9.81);

/// Distance covered while braking at `decel` from `speed` under
/// semi-implicit Euler stepping (speed drops before the step's movement).
double brake_stop_distance(double speed, double decel, double dt);

/// Largest next-step speed v' such that travelling v'*dt now and then
/// braking at `decel` covers at most `reach` metres. Inverse of
/// v'*dt + brake_stop_distance(v').
double max_safe_next_speed(double reach, double decel, double dt);

/// Maximum acceleration the ego may apply this step such that, with the
/// leader braking at phys_decel from now on, the ego can still stop
/// min_gap short of it. Infinite gap returns max_accel; the result is
/// clamped to [-phys_decel, max_accel].
double safe_accel_bound(double ego_speed, double leader_gap, double leader_speed,
                        const SafetyParams& safety);

}  // namespace weave
