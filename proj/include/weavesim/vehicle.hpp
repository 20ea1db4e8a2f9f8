#pragma once

#include <cstdint>

#include "weavesim/road.hpp"

namespace weave {

using VehicleId = std::uint64_t;

/// One vehicle. `pos` is the front-bumper position; the body occupies
/// [pos - length, pos] on its lane.
struct Vehicle {
    VehicleId id = 0;
    double pos = 0.0;
    LaneId lane = 0;
    double speed = 0.0;
    double accel = 0.0;  // realized on the last step
    double length = 5.0;
    Route route = Route::ThroughFreeway;
    Blinker blinker = Blinker::Off;
    int blinker_hold = 0;  // steps the blinker lingers after intent ceases
    bool controlled = false;
    double spawn_time = 0.0;
    double exit_time = -1.0;

    // baseline-driver bookkeeping
    double wait_time = 0.0;     // consecutive seconds at near-zero speed
    bool gave_up = false;       // abandoned a blocked mandatory change
    double change_cooldown = 0.0;

    double rear() const { return pos - length; }
};

}  // namespace weave
