#pragma once

#include <vector>

#include "weavesim/world.hpp"

namespace weave {

/// Weight coefficients of the six reward terms plus the headway threshold.
struct RewardWeights {
    double speed = 0.1;     // W_v
    double lane = 1.0;      // W_l
    double change = 1.0;    // W_c
    double improper = 5.0;  // W_s
    double brake = 1.0;     // W_b
    double headway = 1.0;   // W_h
    double min_headway = 1.0;  // t_min, seconds
};

/// The six per-agent terms and their weighted sum.
struct RewardBreakdown {
    double speed_term = 0.0;     // v_i, m/s
    double lane_term = 0.0;      // l_i in [-1, 1]
    double change_term = 0.0;    // c_i in {-1, 0}
    double improper_term = 0.0;  // s_i in {-1, 0}
    double brake_term = 0.0;     // b_i in {-1, 0}
    double headway_term = 0.0;   // h_i in [-1, 0]
    double total = 0.0;

    double recompose(const RewardWeights& w) const {
        return w.speed * speed_term + w.lane * lane_term + w.change * change_term +
               w.improper * improper_term + w.brake * brake_term + w.headway * headway_term;
    }
};

/// Early-lane-change shaping: +1 -> 0 along the weave on a desired lane,
/// 0 -> -1 off it. `distance_into_weave` outside [0, d_max] is clamped.
double lane_reward(double distance_into_weave, bool on_desired_lane, double d_max);

/// min((t - t_min)/t_min, 0); pass kNoLeader (or +inf) for a clear lane.
double headway_penalty(double time_headway, double min_headway);

/// Lanes counted as desired for a route: off-ramp-bound vehicles want the
/// rightmost mainline lane or the auxiliary lane, everyone else any mainline
/// lane.
std::vector<LaneId> desired_lanes(Route route, const RoadNetwork& road);
bool on_desired_lane(Route route, LaneId lane, const RoadNetwork& road);

/// Everything about one agent's step the reward needs to see.
struct AgentStepEvents {
    bool changed_lane = false;
    bool improper_intent = false;
    bool emergency_brake = false;
};

/// Reward for one agent from its post-step state. The time headway uses the
/// post-step bumper gap with the speed floored at 0.1 m/s.
RewardBreakdown compute_reward(const Vehicle& post_state, double leader_gap,
                               const AgentStepEvents& events, const RewardWeights& weights,
                               const RoadNetwork& road);

}  // namespace weave
