#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "weavesim/episode_log.hpp"
#include "weavesim/idm.hpp"
#include "weavesim/rng.hpp"
#include "weavesim/road.hpp"
#include "weavesim/vehicle.hpp"

namespace weave {

/// Resolved per-vehicle command for one step. `accel` has already been
/// mediated by the safety layer at decision time; step_world re-applies the
/// bound after lane moves so the no-overlap invariant holds regardless.
struct StepCommand {
    double accel = 0.0;
    LaneDecision move = LaneDecision::Stay;   // executes only if still feasible
    bool intent = false;                      // a non-Stay decision was commanded
    bool improper = false;                    // intent vetoed by feasibility
    Blinker blinker = Blinker::Off;           // direction signalled this step
};

/// What happened to one vehicle during a step; exited vehicles keep their
/// final state here after removal from the world.
struct VehicleOutcome {
    VehicleId id = 0;
    Vehicle state;           // post-step snapshot
    double realized_accel = 0.0;
    bool changed_lane = false;
    bool improper_intent = false;
    bool emergency_brake = false;
    bool exited = false;
    bool spawned = false;
    unsigned flags() const {
        return (spawned ? kEventSpawned : 0u) | (changed_lane ? kEventLaneChanged : 0u) |
               (emergency_brake ? kEventEmergencyBrake : 0u) | (exited ? kEventExited : 0u);
    }
};

/// The single source of truth for one episode's traffic, stepped at a fixed
/// dt. All mutation goes through spawn_inflow / step_world.
class WorldState {
public:
    explicit WorldState(const SimConfig& cfg);

    const SimConfig& config() const { return cfg_; }
    double time() const { return time_; }
    int step_index() const { return step_; }

    const std::vector<Vehicle>& vehicles() const { return vehicles_; }
    const Vehicle* find(VehicleId id) const;
    const Vehicle& at(VehicleId id) const;  // throws StructuralError when unknown

    // conservation counters
    std::uint64_t generated_count() const { return generated_; }
    std::uint64_t exited_count() const { return exited_; }
    std::uint64_t queued_count() const;
    std::uint64_t active_count() const { return vehicles_.size(); }

    /// Nearest vehicle strictly ahead of `pos` on `lane` (front >= pos when
    /// excluding the querying vehicle itself). Null when none.
    const Vehicle* leader_on(LaneId lane, double pos, VehicleId exclude) const;
    const Vehicle* follower_on(LaneId lane, double pos, VehicleId exclude) const;
    const Vehicle* leader_of(const Vehicle& v) const { return leader_on(v.lane, v.pos, v.id); }

    /// Bumper-to-bumper gap to the leader, kNoLeader when the lane is clear.
    double leader_gap(const Vehicle& v) const;

    /// Places a vehicle directly (scenario construction). Assigns an id when
    /// none is given; throws DomainError off-lane and WorldFault on overlap.
    VehicleId insert_vehicle(Vehicle v);

    /// Draws arrivals, assigns routes and injects queued vehicles whose entry
    /// cell is free. Returns outcomes for the vehicles spawned this call.
    std::vector<VehicleOutcome> spawn_inflow(Rng& rng);

    /// Advances the world by one dt. `commands` must be aligned with
    /// vehicles() order. Returns one outcome per vehicle (exited ones
    /// included). Throws WorldFault on a post-step overlap.
    std::vector<VehicleOutcome> step_world(const std::vector<StepCommand>& commands);

    /// Refreshes Vehicle::controlled from position and cfg.rl_control.
    void refresh_controlled();

private:
    struct Entry {
        LaneId lane;
        double spawn_front;   // front-bumper position of a fresh spawn
        double nominal_speed;
        double rate_vphpl;
        bool freeway;
        double next_arrival;
        std::deque<Route> queue;
    };

    void reindex();
    bool entry_free(const Entry& e) const;
    void check_overlaps() const;

    SimConfig cfg_;
    double time_ = 0.0;
    int step_ = 0;
    std::vector<Vehicle> vehicles_;                 // spawn order
    std::vector<std::vector<int>> lane_order_;      // per-lane indices sorted by pos
    std::vector<Entry> entries_;
    VehicleId next_id_ = 1;
    std::uint64_t generated_ = 0;
    std::uint64_t exited_ = 0;
};

/// True iff moving `v` sideways into `target_lane` right now is physically
/// acceptable: the target gap holds the vehicle with min_gap margins and
/// neither the new follower nor the mover itself would be forced below
/// -max_decel by the insertion. Throws StructuralError for a non-adjacent or
/// non-existent target lane.
bool lane_change_feasible(const Vehicle& v, LaneId target_lane, const WorldState& world);

/// Direction the baseline driver wants to move (route-driven mandatory
/// seeking or discretionary incentive). No feasibility applied.
LaneDecision baseline_lane_intent(const Vehicle& v, const WorldState& world,
                                  const DriverParams& params);

/// Executed baseline decision: the intent if it passes gap acceptance
/// (feasibility plus lead/lag margins scaled down with merge urgency),
/// otherwise Stay.
LaneDecision baseline_lane_decision(const Vehicle& v, const WorldState& world,
                                    const DriverParams& params);

/// IDM acceleration toward the current leader, plus virtual-wall braking at
/// the gore for vehicles that must still change lanes to follow their route.
double baseline_acceleration(const Vehicle& v, const WorldState& world,
                             const DriverParams& params);

}  // namespace weave
