#pragma once

#include <optional>

#include "weavesim/errors.hpp"

namespace weave {

using LaneId = int;

enum class Route { ThroughFreeway, ExitOffRamp, EnterFromOnRamp };
enum class Blinker { Off, Left, Right };
enum class LaneDecision { Stay, Left, Right };

/// Weaving-area geometry. Mainline lanes are indexed 0 (rightmost) to
/// mainline_lanes-1 (leftmost); the auxiliary lane connecting the on-ramp to
/// the off-ramp sits to the right of lane 0 and carries index mainline_lanes.
/// Longitudinal positions run from 0 (segment start) to mainline_length.
struct RoadNetwork {
    double mainline_length = 500.0;
    double upstream_length = 200.0;    // start to on-ramp gore
    double weave_length = 200.0;       // on-ramp gore to off-ramp gore
    double downstream_length = 100.0;  // off-ramp gore to segment end
    int mainline_lanes = 3;
    double freeway_speed_limit = 29.0576;  // 65 mph
    double ramp_speed_limit = 17.8816;     // 40 mph
    double control_zone_margin = 100.0;    // zone extends this far past both gores

    double on_ramp_gore() const { return upstream_length; }
    double off_ramp_gore() const { return upstream_length + weave_length; }
    double control_zone_begin() const { return on_ramp_gore() - control_zone_margin; }
    double control_zone_end() const { return off_ramp_gore() + control_zone_margin; }
    bool in_control_zone(double pos) const {
        return pos >= control_zone_begin() && pos <= control_zone_end();
    }

    LaneId aux_lane() const { return mainline_lanes; }
    int lane_count() const { return mainline_lanes + 1; }
    bool is_mainline(LaneId lane) const { return lane >= 0 && lane < mainline_lanes; }

    bool lane_exists_at(LaneId lane, double pos) const {
        if (is_mainline(lane)) return pos >= 0.0 && pos <= mainline_length;
        if (lane == aux_lane()) return pos >= on_ramp_gore() && pos <= off_ramp_gore();
        return false;
    }

    /// Lane immediately to the left (toward the median) at the given
    /// position, if one exists there.
    std::optional<LaneId> left_of(LaneId lane, double pos) const {
        if (lane == aux_lane()) {
            if (pos >= on_ramp_gore() && pos <= off_ramp_gore()) return 0;
            return std::nullopt;
        }
        if (lane + 1 < mainline_lanes) return lane + 1;
        return std::nullopt;
    }

    /// Lane immediately to the right (toward the shoulder). Lane 0 borders
    /// the auxiliary lane only within the weave section.
    std::optional<LaneId> right_of(LaneId lane, double pos) const {
        if (lane == aux_lane()) return std::nullopt;
        if (lane == 0) {
            if (pos >= on_ramp_gore() && pos < off_ramp_gore()) return aux_lane();
            return std::nullopt;
        }
        if (lane > 0 && lane < mainline_lanes) return lane - 1;
        return std::nullopt;
    }

    void validate() const {
        if (upstream_length + weave_length + downstream_length != mainline_length)
            throw DomainError("road: section lengths must sum to mainline_length");
        if (mainline_lanes < 1) throw DomainError("road: need at least one mainline lane");
        if (freeway_speed_limit <= 0.0 || ramp_speed_limit <= 0.0)
            throw DomainError("road: speed limits must be positive");
        if (control_zone_begin() <= 0.0 || control_zone_end() > mainline_length)
            throw DomainError("road: control zone must lie inside the segment");
    }
};

/// Baseline (human-driver) car-following and gap-acceptance parameters.
struct DriverParams {
    double desired_speed = 29.0576;  // v0
    double time_headway = 1.2;       // T
    double min_gap = 2.0;            // s0
    double max_accel = 2.0;          // a
    double comfort_decel = 3.0;      // b
    double exponent = 4.0;           // delta
    double lead_margin = 2.0;        // extra lead gap demanded for a lane change
    double lag_margin = 4.0;         // extra lag gap demanded for a lane change
    double incentive_threshold = 0.3;  // IDM accel gain required for a discretionary change
    double patience = 15.0;            // seconds stopped before abandoning a blocked merge
    double change_cooldown = 1.0;      // seconds between baseline lane changes

    void validate() const {
        if (desired_speed <= 0 || time_headway < 0.5 || min_gap <= 0 || max_accel <= 0 ||
            comfort_decel <= 0 || exponent <= 0)
            throw DomainError("driver: parameters must be positive (time_headway >= 0.5)");
    }
};

/// Demand at the segment entries.
struct InflowSpec {
    double freeway_vphpl = 1200.0;
    double ramp_vphpl = 1200.0;
    double exit_fraction = 0.5;     // freeway inflow routed to the off-ramp
    double min_spawn_headway = 1.0; // seconds

    void validate() const {
        if (freeway_vphpl < 0 || ramp_vphpl < 0)
            throw DomainError("inflow: rates must be non-negative");
        if (exit_fraction < 0.0 || exit_fraction > 1.0)
            throw DomainError("inflow: exit_fraction must lie in [0,1]");
    }
};

/// Collision-prevention layer constants.
struct SafetyParams {
    double min_gap = 2.0;      // standstill margin kept behind the leader
    double phys_decel = 9.81;  // hardest braking the layer may command
    double max_accel = 4.0;
    double dt = 0.2;
};

/// Everything the simulator needs to run one scenario.
struct SimConfig {
    RoadNetwork road;
    DriverParams driver;
    InflowSpec inflow;
    double dt = 0.2;
    int episode_steps = 1000;
    double vehicle_length = 5.0;
    double min_gap = 2.0;           // s0 for the safety layer
    double max_accel = 4.0;         // action-space ceiling
    double max_decel = 8.0;         // action-space floor (magnitude)
    double phys_decel = 9.81;       // safety-layer floor (magnitude)
    double emergency_decel = 9.0;   // realized decel above this emits EmergencyBrake
    bool rl_control = false;        // vehicles inside the control zone take RL actions

    SafetyParams safety() const { return {min_gap, phys_decel, max_accel, dt}; }

    void validate() const {
        road.validate();
        driver.validate();
        inflow.validate();
        if (dt <= 0 || episode_steps < 0 || vehicle_length <= 0 || min_gap <= 0)
            throw DomainError("sim: dt, vehicle_length and min_gap must be positive");
        if (max_accel <= 0 || max_decel <= 0 || phys_decel < max_decel)
            throw DomainError("sim: accel bounds must be positive with phys_decel >= max_decel");
    }
};

}  // namespace weave
