#pragma once

#include <string>
#include <vector>

#include "weavesim/vehicle.hpp"

namespace weave {

enum EventFlag : unsigned {
    kEventSpawned = 1u,
    kEventLaneChanged = 2u,
    kEventEmergencyBrake = 4u,
    kEventExited = 8u,
};

/// Post-step state of one vehicle at one step. `accel` is the realized
/// acceleration (v_post - v_pre)/dt.
struct LogRow {
    int step = 0;
    VehicleId id = 0;
    LaneId lane = 0;
    double pos = 0.0;
    double speed = 0.0;
    double accel = 0.0;
    Route route = Route::ThroughFreeway;
    unsigned flags = 0;
};

/// Per-step per-vehicle trace of one episode, ordered by (step, spawn order).
struct EpisodeLog {
    double dt = 0.2;
    int episode_steps = 0;
    std::vector<LogRow> rows;

    double time_of(const LogRow& r) const { return (r.step + 1) * dt; }
};

std::string route_name(Route r);
Route route_from_name(const std::string& name);
std::string event_flags_string(unsigned flags);
unsigned event_flags_from_string(const std::string& s);

/// CSV with header: time_s,vehicle_id,lane,pos_m,speed_mps,accel_mps2,route,event_flags
std::string episode_log_to_csv(const EpisodeLog& log);
EpisodeLog episode_log_from_csv(const std::string& csv, double dt = 0.2);

}  // namespace weave
