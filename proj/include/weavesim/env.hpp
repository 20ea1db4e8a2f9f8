#pragma once

#include <map>
#include <vector>

#include "weavesim/observation.hpp"
#include "weavesim/reward.hpp"
#include "weavesim/world.hpp"

namespace weave {

inline constexpr double kActionAccelMin = -8.0;
inline constexpr double kActionAccelMax = 4.0;

/// Hybrid action: continuous acceleration plus a lane decision. `accel_raw`
/// keeps the pre-clamp Gaussian sample so the PPO probability ratio stays
/// well-defined; for non-learned policies it equals `accel`.
struct AgentAction {
    double accel = 0.0;
    double accel_raw = 0.0;
    LaneDecision lane = LaneDecision::Stay;
};

struct PolicyDecision {
    AgentAction action;
    double log_prob = 0.0;
    double value = 0.0;
};

/// Anything that can drive controlled vehicles.
class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyDecision act(const Observation& obs, Rng& rng) = 0;
    virtual double value(const Observation&) { return 0.0; }
};

/// Uniform accel in [-8, 4] and uniform lane decision.
class RandomPolicy : public Policy {
public:
    PolicyDecision act(const Observation&, Rng& rng) override;
};

struct EnvConfig {
    SimConfig sim;
    RewardWeights rewards;
};

/// Builds step commands for every vehicle: controlled vehicles take their
/// supplied action (acceleration mediated by the safety bound, lane moves
/// gated on feasibility with vetoed intents flagged improper); everyone else
/// follows the baseline driver. Throws StructuralError when a controlled
/// vehicle has no action.
std::vector<StepCommand> apply_actions(const WorldState& world,
                                       const std::map<VehicleId, AgentAction>& actions);

struct AgentReward {
    VehicleId id = 0;
    RewardBreakdown reward;
    bool done = false;  // the vehicle exited this step
};

struct EnvStepResult {
    std::vector<VehicleOutcome> outcomes;   // per pre-step vehicle, exits included
    std::vector<AgentReward> agent_rewards; // one per acting agent, same order as ids
    double system_reward = 0.0;             // sum of agent totals this step
};

/// One episode's MDP view over a WorldState.
class MdpEnv {
public:
    MdpEnv(const EnvConfig& cfg, std::uint64_t seed);

    const WorldState& world() const { return world_; }
    const EnvConfig& config() const { return cfg_; }
    Rng& rng() { return rng_; }
    bool done() const { return world_.step_index() >= cfg_.sim.episode_steps; }

    /// Spawns inflow and refreshes control-zone membership; returns the ids
    /// (in spawn order) that must receive actions this step.
    std::vector<VehicleId> begin_step();

    Observation observe(VehicleId id) const { return build_observation(world_, id); }

    /// Applies actions, advances the world one dt and computes rewards for
    /// the acting agents.
    EnvStepResult step(const std::map<VehicleId, AgentAction>& actions);

private:
    EnvConfig cfg_;
    WorldState world_;
    Rng rng_;
    bool step_open_ = false;
};

/// Per-agent transition record for the trainer.
struct AgentTrajectory {
    VehicleId id = 0;
    std::vector<Observation> obs;
    std::vector<AgentAction> actions;
    std::vector<double> log_probs;
    std::vector<double> values;
    std::vector<double> rewards;
    bool terminated = false;        // exited (terminal) vs cut off at the horizon
    double bootstrap_value = 0.0;   // V(s_T) when cut off
};

enum class CollectMode { None, Training };

/// Per-step per-agent reward breakdown, kept for auditing.
struct RewardAuditRow {
    int step = 0;
    VehicleId id = 0;
    RewardBreakdown reward;
};

struct EpisodeResult {
    EpisodeLog log;
    std::vector<double> system_reward_per_step;
    double system_reward_total = 0.0;
    std::vector<AgentTrajectory> trajectories;
    std::vector<RewardAuditRow> reward_audit;
    std::uint64_t generated = 0, exited = 0, queued = 0;
};

std::string reward_audit_csv(const std::vector<RewardAuditRow>& rows, double dt);

/// Runs a full episode: spawn -> observe -> act -> apply -> step -> reward.
EpisodeResult run_episode(Policy& policy, const EnvConfig& cfg, std::uint64_t seed,
                          CollectMode collect = CollectMode::None);

}  // namespace weave
