#pragma once

#include <array>

#include "weavesim/world.hpp"

namespace weave {

inline constexpr int kObservationSize = 29;
inline constexpr double kDetectionRange = 200.0;

/// Per-agent feature vector, every entry in [0, 1]. Layout:
///   [0..4]   ego: speed, pos_x, pos_y, lane_index, destination
///   [5..28]  six neighbour blocks of [distance, speed, blinker, destination]
///            in the order same-lane leader, same-lane follower, left-front,
///            left-rear, right-front, right-rear.
/// pos_y and lane_index both carry the lane ordinate (the discrete-lane world
/// has no separate lateral coordinate). destination is 1 for off-ramp-bound
/// vehicles. Absent front neighbours read as a speed-limit vehicle 200 m
/// ahead, absent rear neighbours as a stopped vehicle 200 m behind, and a
/// non-existent adjacent lane zeroes its two blocks.
using Observation = std::array<double, kObservationSize>;

Observation build_observation(const WorldState& world, VehicleId id);

}  // namespace weave
