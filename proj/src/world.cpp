#include "weavesim/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace weave {

WorldState::WorldState(const SimConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    lane_order_.resize(cfg_.road.lane_count());

    const double freeway_nominal =
        std::min(cfg_.road.freeway_speed_limit, cfg_.driver.desired_speed);
    for (LaneId lane = 0; lane < cfg_.road.mainline_lanes; ++lane) {
        entries_.push_back({lane, cfg_.vehicle_length, freeway_nominal,
                            cfg_.inflow.freeway_vphpl, true, -1.0, {}});
    }
    entries_.push_back({cfg_.road.aux_lane(),
                        cfg_.road.on_ramp_gore() + cfg_.vehicle_length,
                        cfg_.road.ramp_speed_limit, cfg_.inflow.ramp_vphpl, false, -1.0, {}});
}

const Vehicle* WorldState::find(VehicleId id) const {
    for (const auto& v : vehicles_)
        if (v.id == id) return &v;
    return nullptr;
}

const Vehicle& WorldState::at(VehicleId id) const {
    const Vehicle* v = find(id);
    if (!v) throw StructuralError("unknown vehicle id " + std::to_string(id));
    return *v;
}

std::uint64_t WorldState::queued_count() const {
    std::uint64_t n = 0;
    for (const auto& e : entries_) n += e.queue.size();
    return n;
}

void WorldState::reindex() {
    for (auto& order : lane_order_) order.clear();
    for (int i = 0; i < static_cast<int>(vehicles_.size()); ++i)
        lane_order_[vehicles_[i].lane].push_back(i);
    for (auto& order : lane_order_)
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (vehicles_[a].pos != vehicles_[b].pos) return vehicles_[a].pos < vehicles_[b].pos;
            return vehicles_[a].id < vehicles_[b].id;
        });
}

const Vehicle* WorldState::leader_on(LaneId lane, double pos, VehicleId exclude) const {
    if (lane < 0 || lane >= static_cast<LaneId>(lane_order_.size())) return nullptr;
    for (int idx : lane_order_[lane]) {
        const Vehicle& v = vehicles_[idx];
        if (v.id == exclude) continue;
        if (v.pos >= pos) return &v;
    }
    return nullptr;
}

const Vehicle* WorldState::follower_on(LaneId lane, double pos, VehicleId exclude) const {
    if (lane < 0 || lane >= static_cast<LaneId>(lane_order_.size())) return nullptr;
    const Vehicle* best = nullptr;
    for (int idx : lane_order_[lane]) {
        const Vehicle& v = vehicles_[idx];
        if (v.id == exclude) continue;
        if (v.pos < pos) best = &v;
        else break;
    }
    return best;
}

double WorldState::leader_gap(const Vehicle& v) const {
    const Vehicle* lead = leader_of(v);
    if (!lead) return kNoLeader;
    return std::max(0.0, lead->rear() - v.pos);
}

bool WorldState::entry_free(const Entry& e) const {
    if (lane_order_[e.lane].empty()) return true;
    const Vehicle& rearmost = vehicles_[lane_order_[e.lane].front()];
    return rearmost.rear() >= e.spawn_front + cfg_.min_gap;
}

VehicleId WorldState::insert_vehicle(Vehicle v) {
    if (!cfg_.road.lane_exists_at(v.lane, v.pos))
        throw DomainError("insert_vehicle: lane " + std::to_string(v.lane) +
                          " does not exist at pos " + std::to_string(v.pos));
    if (v.id == 0) v.id = next_id_++;
    else next_id_ = std::max(next_id_, v.id + 1);
    if (v.length <= 0.0) v.length = cfg_.vehicle_length;
    v.spawn_time = time_;
    v.controlled = cfg_.rl_control && cfg_.road.in_control_zone(v.pos);
    vehicles_.push_back(v);
    ++generated_;
    reindex();
    check_overlaps();
    return v.id;
}

std::vector<VehicleOutcome> WorldState::spawn_inflow(Rng& rng) {
    std::vector<VehicleOutcome> spawned;
    const double min_hw = cfg_.inflow.min_spawn_headway;
    for (auto& e : entries_) {
        if (e.rate_vphpl <= 0.0) continue;
        const double mean_extra = std::max(0.0, 3600.0 / e.rate_vphpl - min_hw);
        if (e.next_arrival < 0.0) e.next_arrival = time_ + min_hw + rng.exponential(mean_extra);
        while (e.next_arrival <= time_) {
            Route route = Route::EnterFromOnRamp;
            if (e.freeway)
                route = rng.uniform01() < cfg_.inflow.exit_fraction ? Route::ExitOffRamp
                                                                    : Route::ThroughFreeway;
            e.queue.push_back(route);
            ++generated_;
            e.next_arrival += min_hw + rng.exponential(mean_extra);
        }
        while (!e.queue.empty() && entry_free(e)) {
            Vehicle v;
            v.id = next_id_++;
            v.pos = e.spawn_front;
            v.lane = e.lane;
            v.length = cfg_.vehicle_length;
            v.route = e.queue.front();
            v.spawn_time = time_;
            const Vehicle* lead = leader_on(e.lane, e.spawn_front, v.id);
            double v_safe = e.nominal_speed;
            if (lead) {
                const double gap = lead->rear() - e.spawn_front;
                const double reach = gap - cfg_.min_gap +
                                     brake_stop_distance(lead->speed, cfg_.phys_decel, cfg_.dt);
                v_safe = std::min(v_safe, max_safe_next_speed(reach, cfg_.phys_decel, cfg_.dt));
            }
            v.speed = std::max(0.0, v_safe);
            v.controlled = cfg_.rl_control && cfg_.road.in_control_zone(v.pos);
            e.queue.pop_front();
            vehicles_.push_back(v);
            reindex();

            VehicleOutcome out;
            out.id = v.id;
            out.state = v;
            out.spawned = true;
            spawned.push_back(out);
        }
    }
    return spawned;
}

void WorldState::refresh_controlled() {
    for (auto& v : vehicles_)
        v.controlled = cfg_.rl_control && cfg_.road.in_control_zone(v.pos);
}

void WorldState::check_overlaps() const {
    for (LaneId lane = 0; lane < static_cast<LaneId>(lane_order_.size()); ++lane) {
        const auto& order = lane_order_[lane];
        for (std::size_t k = 1; k < order.size(); ++k) {
            const Vehicle& behind = vehicles_[order[k - 1]];
            const Vehicle& ahead = vehicles_[order[k]];
            if (ahead.rear() < behind.pos - 1e-9)
                throw WorldFault("overlap on lane " + std::to_string(lane) + " between vehicles " +
                                 std::to_string(behind.id) + " and " + std::to_string(ahead.id) +
                                 " at t=" + std::to_string(time_));
        }
    }
}

std::vector<VehicleOutcome> WorldState::step_world(const std::vector<StepCommand>& commands) {
    if (commands.size() != vehicles_.size())
        throw StructuralError("step_world: command count does not match vehicle count");

    const int n = static_cast<int>(vehicles_.size());
    std::vector<VehicleOutcome> outcomes(n);
    for (int i = 0; i < n; ++i) {
        outcomes[i].id = vehicles_[i].id;
        outcomes[i].improper_intent = commands[i].improper;
        outcomes[i].spawned = vehicles_[i].spawn_time == time_;
    }

    // blinkers: signalled during the intent step and one step beyond
    for (int i = 0; i < n; ++i) {
        Vehicle& v = vehicles_[i];
        if (commands[i].intent) {
            v.blinker = commands[i].blinker;
            v.blinker_hold = 1;
        } else if (v.blinker_hold > 0) {
            v.blinker_hold = 0;
        } else {
            v.blinker = Blinker::Off;
        }
    }

    // lane moves, downstream first, re-validated against the evolving layout
    std::vector<int> movers;
    for (int i = 0; i < n; ++i)
        if (commands[i].move != LaneDecision::Stay) movers.push_back(i);
    std::sort(movers.begin(), movers.end(), [&](int a, int b) {
        if (vehicles_[a].pos != vehicles_[b].pos) return vehicles_[a].pos > vehicles_[b].pos;
        return vehicles_[a].id < vehicles_[b].id;
    });
    for (int i : movers) {
        Vehicle& v = vehicles_[i];
        const auto target = commands[i].move == LaneDecision::Left
                                ? cfg_.road.left_of(v.lane, v.pos)
                                : cfg_.road.right_of(v.lane, v.pos);
        if (!target) continue;
        if (!lane_change_feasible(v, *target, *this)) continue;  // pre-empted by another mover
        v.lane = *target;
        outcomes[i].changed_lane = true;
        v.change_cooldown = cfg_.driver.change_cooldown;
        reindex();
    }

    // resolve accelerations against the post-move, pre-integration state
    std::vector<double> accel(n);
    const SafetyParams safety = cfg_.safety();
    for (int i = 0; i < n; ++i) {
        const Vehicle& v = vehicles_[i];
        const Vehicle* lead = leader_of(v);
        const double gap = lead ? lead->rear() - v.pos : kNoLeader;
        const double lead_speed = lead ? lead->speed : 0.0;
        double a = std::min(commands[i].accel, safe_accel_bound(v.speed, gap, lead_speed, safety));
        a = std::min(a, (cfg_.road.freeway_speed_limit - v.speed) / cfg_.dt);
        accel[i] = std::clamp(a, -cfg_.phys_decel, cfg_.max_accel);
    }

    // semi-implicit Euler, applied simultaneously
    std::vector<bool> exited(n, false);
    for (int i = 0; i < n; ++i) {
        Vehicle& v = vehicles_[i];
        const double v_prev = v.speed;
        v.speed = std::max(0.0, v_prev + accel[i] * cfg_.dt);
        v.pos += v.speed * cfg_.dt;
        v.accel = (v.speed - v_prev) / cfg_.dt;
        outcomes[i].realized_accel = v.accel;
        // strictly-greater threshold with slack for roundoff at the boundary
        outcomes[i].emergency_brake = v.accel < -cfg_.emergency_decel - 1e-9;

        if (v.lane == cfg_.road.aux_lane() && v.pos > cfg_.road.off_ramp_gore())
            exited[i] = true;
        else if (v.pos > cfg_.road.mainline_length)
            exited[i] = true;
        if (exited[i]) {
            v.exit_time = time_ + cfg_.dt;
            outcomes[i].exited = true;
            ++exited_;
        }

        if (v.speed < 0.5) v.wait_time += cfg_.dt;
        else v.wait_time = 0.0;
        v.change_cooldown = std::max(0.0, v.change_cooldown - cfg_.dt);

        if (v.route == Route::ExitOffRamp && !v.gave_up) {
            if (v.pos > cfg_.road.off_ramp_gore() && v.lane != cfg_.road.aux_lane())
                v.gave_up = true;  // missed the exit, continues downstream
            else if (v.lane == 0 && v.pos >= cfg_.road.on_ramp_gore() &&
                     v.wait_time > cfg_.driver.patience)
                v.gave_up = true;  // abandons the blocked exit
        }
        if (v.route == Route::EnterFromOnRamp && !v.gave_up && v.lane == cfg_.road.aux_lane() &&
            v.pos >= cfg_.road.off_ramp_gore() - 50.0 && v.wait_time > cfg_.driver.patience) {
            v.gave_up = true;  // stops holding at the lane end, takes the off-ramp
        }

        outcomes[i].state = v;
    }

    std::vector<Vehicle> remaining;
    remaining.reserve(vehicles_.size());
    for (int i = 0; i < n; ++i)
        if (!exited[i]) remaining.push_back(vehicles_[i]);
    vehicles_ = std::move(remaining);
    reindex();
    check_overlaps();

    time_ += cfg_.dt;
    ++step_;
    return outcomes;
}

bool lane_change_feasible(const Vehicle& v, LaneId target_lane, const WorldState& world) {
    const RoadNetwork& road = world.config().road;
    const auto left = road.left_of(v.lane, v.pos);
    const auto right = road.right_of(v.lane, v.pos);
    const bool adjacent = (left && *left == target_lane) || (right && *right == target_lane);
    if (!adjacent)
        throw StructuralError("lane_change_feasible: target lane " + std::to_string(target_lane) +
                              " is not adjacent to lane " + std::to_string(v.lane));

    const SafetyParams safety = world.config().safety();
    const double max_decel = world.config().max_decel;

    const Vehicle* lead = world.leader_on(target_lane, v.pos, v.id);
    const Vehicle* follow = world.follower_on(target_lane, v.pos, v.id);

    const double lead_gap = lead ? lead->rear() - v.pos : kNoLeader;
    if (lead_gap < safety.min_gap) return false;
    const double lag_gap = follow ? v.rear() - follow->pos : kNoLeader;
    if (lag_gap < safety.min_gap) return false;

    if (safe_accel_bound(v.speed, lead_gap, lead ? lead->speed : 0.0, safety) < -max_decel)
        return false;
    if (follow &&
        safe_accel_bound(follow->speed, lag_gap, v.speed, safety) < -max_decel)
        return false;
    return true;
}

namespace {

// urgency in [0,1] for a route-mandatory change: 0 upstream of the on-ramp
// gore, 1 at the off-ramp gore
double merge_urgency(const Vehicle& v, const RoadNetwork& road) {
    return std::clamp((v.pos - road.on_ramp_gore()) / road.weave_length, 0.0, 1.0);
}

struct IntentInfo {
    LaneDecision dir = LaneDecision::Stay;
    bool mandatory = false;
};

IntentInfo baseline_intent_info(const Vehicle& v, const WorldState& world,
                                const DriverParams& params) {
    const RoadNetwork& road = world.config().road;
    if (v.change_cooldown > 0.0) return {};

    if (v.route == Route::ExitOffRamp && !v.gave_up) {
        if (v.lane == road.aux_lane()) return {};
        if (road.right_of(v.lane, v.pos)) return {LaneDecision::Right, true};
        return {};
    }
    if (v.route == Route::EnterFromOnRamp && !v.gave_up && v.lane == road.aux_lane())
        return {LaneDecision::Left, true};

    // discretionary: change only for a clear IDM acceleration gain
    const Vehicle* lead = world.leader_of(v);
    const double cur_gap = lead ? std::max(0.01, lead->rear() - v.pos) : kNoLeader;
    const double a_cur =
        idm_acceleration(v.speed, cur_gap, lead ? lead->speed : 0.0, params);

    LaneDecision best = LaneDecision::Stay;
    double best_gain = params.incentive_threshold;
    for (LaneDecision dir : {LaneDecision::Left, LaneDecision::Right}) {
        const auto target = dir == LaneDecision::Left ? road.left_of(v.lane, v.pos)
                                                      : road.right_of(v.lane, v.pos);
        if (!target || *target == road.aux_lane()) continue;
        const Vehicle* tlead = world.leader_on(*target, v.pos, v.id);
        const double tgap = tlead ? tlead->rear() - v.pos : kNoLeader;
        if (tgap <= 0.0) continue;
        const double a_t =
            idm_acceleration(v.speed, std::max(0.01, tgap), tlead ? tlead->speed : 0.0, params);
        if (a_t - a_cur > best_gain) {
            best_gain = a_t - a_cur;
            best = dir;
        }
    }
    return {best, false};
}

}  // namespace

LaneDecision baseline_lane_intent(const Vehicle& v, const WorldState& world,
                                  const DriverParams& params) {
    return baseline_intent_info(v, world, params).dir;
}

LaneDecision baseline_lane_decision(const Vehicle& v, const WorldState& world,
                                    const DriverParams& params) {
    const IntentInfo intent = baseline_intent_info(v, world, params);
    if (intent.dir == LaneDecision::Stay) return LaneDecision::Stay;

    const RoadNetwork& road = world.config().road;
    const auto target = intent.dir == LaneDecision::Left ? road.left_of(v.lane, v.pos)
                                                         : road.right_of(v.lane, v.pos);
    if (!target) return LaneDecision::Stay;
    if (!lane_change_feasible(v, *target, world)) return LaneDecision::Stay;

    // gap acceptance on top of bare feasibility; margins relax as a
    // mandatory change becomes urgent
    const double u = intent.mandatory ? merge_urgency(v, road) : 0.0;
    const double need_lead = world.config().min_gap + params.lead_margin * (1.0 - u);
    const double need_lag = world.config().min_gap + params.lag_margin * (1.0 - u);
    const Vehicle* lead = world.leader_on(*target, v.pos, v.id);
    const Vehicle* follow = world.follower_on(*target, v.pos, v.id);
    if (lead && lead->rear() - v.pos < need_lead) return LaneDecision::Stay;
    if (follow && v.rear() - follow->pos < need_lag) return LaneDecision::Stay;
    return intent.dir;
}

double baseline_acceleration(const Vehicle& v, const WorldState& world,
                             const DriverParams& params) {
    const Vehicle* lead = world.leader_of(v);
    const double gap = lead ? std::max(0.01, lead->rear() - v.pos) : kNoLeader;
    double a = idm_acceleration(v.speed, gap, lead ? lead->speed : 0.0, params,
                                world.config().phys_decel);

    const RoadNetwork& road = world.config().road;
    bool wall = false;
    if (v.route == Route::EnterFromOnRamp && !v.gave_up && v.lane == road.aux_lane())
        wall = true;
    if (v.route == Route::ExitOffRamp && !v.gave_up && v.lane == 0 &&
        v.pos < road.off_ramp_gore())
        wall = true;
    if (wall) {
        const double wgap = std::max(0.01, road.off_ramp_gore() - v.pos);
        a = std::min(a, idm_acceleration(v.speed, wgap, 0.0, params, world.config().phys_decel));
        a = std::min(a, safe_accel_bound(v.speed, wgap, 0.0, world.config().safety()));
    }
    return a;
}

}  // namespace weave
