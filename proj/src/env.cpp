#include "weavesim/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace weave {

PolicyDecision RandomPolicy::act(const Observation&, Rng& rng) {
    PolicyDecision d;
    d.action.accel = rng.uniform(kActionAccelMin, kActionAccelMax);
    d.action.accel_raw = d.action.accel;
    d.action.lane = static_cast<LaneDecision>(rng.uniform_int(3));
    return d;
}

std::vector<StepCommand> apply_actions(const WorldState& world,
                                       const std::map<VehicleId, AgentAction>& actions) {
    const auto& vehicles = world.vehicles();
    const SafetyParams safety = world.config().safety();
    std::vector<StepCommand> commands(vehicles.size());

    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        const Vehicle& v = vehicles[i];
        StepCommand& cmd = commands[i];
        if (v.controlled) {
            auto it = actions.find(v.id);
            if (it == actions.end())
                throw StructuralError("apply_actions: no action for controlled vehicle " +
                                      std::to_string(v.id));
            const AgentAction& act = it->second;
            const LaneDecision intent = act.lane;
            if (intent != LaneDecision::Stay) {
                cmd.intent = true;
                cmd.blinker = intent == LaneDecision::Left ? Blinker::Left : Blinker::Right;
                const auto target = intent == LaneDecision::Left
                                        ? world.config().road.left_of(v.lane, v.pos)
                                        : world.config().road.right_of(v.lane, v.pos);
                if (!target) {
                    cmd.improper = true;  // intent toward a lane that is not there
                } else if (lane_change_feasible(v, *target, world)) {
                    cmd.move = intent;
                } else {
                    cmd.improper = true;
                }
            }
            const Vehicle* lead = world.leader_of(v);
            const double wanted = std::clamp(act.accel, kActionAccelMin, kActionAccelMax);
            cmd.accel = std::min(wanted, safe_accel_bound(v.speed, world.leader_gap(v),
                                                          lead ? lead->speed : 0.0, safety));
        } else {
            const DriverParams& driver = world.config().driver;
            const LaneDecision intent = baseline_lane_intent(v, world, driver);
            if (intent != LaneDecision::Stay) {
                cmd.intent = true;
                cmd.blinker = intent == LaneDecision::Left ? Blinker::Left : Blinker::Right;
                cmd.move = baseline_lane_decision(v, world, driver);
            }
            const Vehicle* lead = world.leader_of(v);
            cmd.accel = std::min(baseline_acceleration(v, world, driver),
                                 safe_accel_bound(v.speed, world.leader_gap(v),
                                                  lead ? lead->speed : 0.0, safety));
        }
    }
    return commands;
}

MdpEnv::MdpEnv(const EnvConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), world_(cfg.sim), rng_(seed) {}

std::vector<VehicleId> MdpEnv::begin_step() {
    world_.spawn_inflow(rng_);
    world_.refresh_controlled();
    step_open_ = true;
    std::vector<VehicleId> ids;
    for (const auto& v : world_.vehicles())
        if (v.controlled) ids.push_back(v.id);
    return ids;
}

EnvStepResult MdpEnv::step(const std::map<VehicleId, AgentAction>& actions) {
    if (!step_open_) begin_step();
    step_open_ = false;

    std::vector<VehicleId> acting;
    for (const auto& v : world_.vehicles())
        if (v.controlled) acting.push_back(v.id);

    EnvStepResult res;
    const auto commands = apply_actions(world_, actions);
    res.outcomes = world_.step_world(commands);

    for (VehicleId id : acting) {
        // outcome index == pre-step vehicle index
        const VehicleOutcome* out = nullptr;
        for (const auto& o : res.outcomes)
            if (o.id == id) { out = &o; break; }
        AgentReward ar;
        ar.id = id;
        ar.done = out->exited;
        AgentStepEvents events{out->changed_lane, out->improper_intent, out->emergency_brake};
        const Vehicle* live = world_.find(id);
        const double gap = live ? world_.leader_gap(*live) : kNoLeader;
        ar.reward = compute_reward(out->state, gap, events, cfg_.rewards, cfg_.sim.road);
        res.system_reward += ar.reward.total;
        res.agent_rewards.push_back(ar);
    }
    return res;
}

EpisodeResult run_episode(Policy& policy, const EnvConfig& cfg, std::uint64_t seed,
                          CollectMode collect) {
    MdpEnv env(cfg, seed);
    EpisodeResult result;
    result.log.dt = cfg.sim.dt;
    result.log.episode_steps = cfg.sim.episode_steps;

    std::map<VehicleId, AgentTrajectory> open_trajs;

    for (int step = 0; step < cfg.sim.episode_steps; ++step) {
        const auto ids = env.begin_step();

        std::map<VehicleId, AgentAction> actions;
        for (VehicleId id : ids) {
            const Observation obs = env.observe(id);
            PolicyDecision d = policy.act(obs, env.rng());
            actions[id] = d.action;
            if (collect == CollectMode::Training) {
                AgentTrajectory& traj = open_trajs[id];
                traj.id = id;
                traj.obs.push_back(obs);
                traj.actions.push_back(d.action);
                traj.log_probs.push_back(d.log_prob);
                traj.values.push_back(d.value);
            }
        }

        const EnvStepResult res = env.step(actions);
        for (const auto& o : res.outcomes) {
            LogRow row;
            row.step = step;
            row.id = o.id;
            row.lane = o.state.lane;
            row.pos = o.state.pos;
            row.speed = o.state.speed;
            row.accel = o.realized_accel;
            row.route = o.state.route;
            row.flags = o.flags();
            result.log.rows.push_back(row);
        }
        result.system_reward_per_step.push_back(res.system_reward);
        result.system_reward_total += res.system_reward;
        for (const auto& ar : res.agent_rewards)
            result.reward_audit.push_back({step, ar.id, ar.reward});

        if (collect == CollectMode::Training) {
            for (const auto& ar : res.agent_rewards) {
                AgentTrajectory& traj = open_trajs[ar.id];
                traj.rewards.push_back(ar.reward.total);
                if (ar.done) {
                    traj.terminated = true;
                    result.trajectories.push_back(std::move(traj));
                    open_trajs.erase(ar.id);
                }
            }
        }
    }

    if (collect == CollectMode::Training) {
        // horizon cut-off: bootstrap still-active agents with V(s_T)
        for (auto& [id, traj] : open_trajs) {
            if (traj.rewards.empty()) continue;
            if (env.world().find(id)) {
                const Observation final_obs = build_observation(env.world(), id);
                traj.bootstrap_value = policy.value(final_obs);
            }
            result.trajectories.push_back(std::move(traj));
        }
        std::sort(result.trajectories.begin(), result.trajectories.end(),
                  [](const AgentTrajectory& a, const AgentTrajectory& b) { return a.id < b.id; });
    }

    result.generated = env.world().generated_count();
    result.exited = env.world().exited_count();
    result.queued = env.world().queued_count();
    return result;
}

std::string reward_audit_csv(const std::vector<RewardAuditRow>& rows, double dt) {
    std::string out = "time_s,vehicle_id,v_i,l_i,c_i,s_i,b_i,h_i,total\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.1f,%llu,%.10g,%.10g,%g,%g,%g,%.10g,%.10g\n",
                      (r.step + 1) * dt, static_cast<unsigned long long>(r.id),
                      r.reward.speed_term, r.reward.lane_term, r.reward.change_term,
                      r.reward.improper_term, r.reward.brake_term, r.reward.headway_term,
                      r.reward.total);
        out += buf;
    }
    return out;
}

}  // namespace weave
