#include "weavesim/observation.hpp"

#include <algorithm>
#include <cmath>

namespace weave {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

Observation build_observation(const WorldState& world, VehicleId id) {
    const Vehicle& ego = world.at(id);
    const RoadNetwork& road = world.config().road;
    const double v_norm = road.freeway_speed_limit;
    const double lane_norm = static_cast<double>(road.lane_count() - 1);

    Observation obs{};
    obs[0] = clamp01(ego.speed / v_norm);
    obs[1] = clamp01(ego.pos / road.mainline_length);
    obs[2] = clamp01(ego.lane / lane_norm);
    obs[3] = obs[2];
    obs[4] = ego.route == Route::ExitOffRamp ? 1.0 : 0.0;

    auto fill_block = [&](int base, const Vehicle* other, bool front, bool lane_exists) {
        if (!lane_exists) return;  // all zeros
        if (other && std::abs(other->pos - ego.pos) <= kDetectionRange) {
            obs[base + 0] = clamp01(std::abs(other->pos - ego.pos) / kDetectionRange);
            obs[base + 1] = clamp01(other->speed / v_norm);
            obs[base + 2] = other->blinker != Blinker::Off ? 1.0 : 0.0;
            obs[base + 3] = other->route == Route::ExitOffRamp ? 1.0 : 0.0;
        } else {
            // fill rule: speed-limit ghost ahead, stopped ghost behind
            obs[base + 0] = 1.0;
            obs[base + 1] = front ? 1.0 : 0.0;
            obs[base + 2] = 0.0;
            obs[base + 3] = 0.0;
        }
    };

    const auto left = road.left_of(ego.lane, ego.pos);
    const auto right = road.right_of(ego.lane, ego.pos);

    fill_block(5, world.leader_on(ego.lane, ego.pos, id), true, true);
    fill_block(9, world.follower_on(ego.lane, ego.pos, id), false, true);
    fill_block(13, left ? world.leader_on(*left, ego.pos, id) : nullptr, true, left.has_value());
    fill_block(17, left ? world.follower_on(*left, ego.pos, id) : nullptr, false,
               left.has_value());
    fill_block(21, right ? world.leader_on(*right, ego.pos, id) : nullptr, true,
               right.has_value());
    fill_block(25, right ? world.follower_on(*right, ego.pos, id) : nullptr, false,
               right.has_value());
    return obs;
}

}  // namespace weave
