#include "weavesim/reward.hpp"

#include <algorithm>
#include <cmath>

namespace weave {

double lane_reward(double distance_into_weave, bool on_desired_lane, double d_max) {
    const double d = std::clamp(distance_into_weave, 0.0, d_max);
    return on_desired_lane ? 1.0 - d / d_max : -d / d_max;
}

double headway_penalty(double time_headway, double min_headway) {
    if (time_headway >= kNoLeader || std::isinf(time_headway)) return 0.0;
    return std::min((time_headway - min_headway) / min_headway, 0.0);
}

std::vector<LaneId> desired_lanes(Route route, const RoadNetwork& road) {
    if (route == Route::ExitOffRamp) return {0, road.aux_lane()};
    std::vector<LaneId> lanes(road.mainline_lanes);
    for (LaneId i = 0; i < road.mainline_lanes; ++i) lanes[i] = i;
    return lanes;
}

bool on_desired_lane(Route route, LaneId lane, const RoadNetwork& road) {
    if (route == Route::ExitOffRamp) return lane == 0 || lane == road.aux_lane();
    return road.is_mainline(lane);
}

RewardBreakdown compute_reward(const Vehicle& post_state, double leader_gap,
                               const AgentStepEvents& events, const RewardWeights& weights,
                               const RoadNetwork& road) {
    RewardBreakdown r;
    r.speed_term = post_state.speed;
    r.lane_term = lane_reward(post_state.pos - road.on_ramp_gore(),
                              on_desired_lane(post_state.route, post_state.lane, road),
                              road.weave_length);
    r.change_term = events.changed_lane ? -1.0 : 0.0;
    r.improper_term = events.improper_intent ? -1.0 : 0.0;
    r.brake_term = events.emergency_brake ? -1.0 : 0.0;
    const double headway = leader_gap >= kNoLeader || std::isinf(leader_gap)
                               ? kNoLeader
                               : leader_gap / std::max(post_state.speed, 0.1);
    r.headway_term = headway_penalty(headway, weights.min_headway);
    r.total = r.recompose(weights);
    return r;
}

}  // namespace weave
