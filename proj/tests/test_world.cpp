#include <doctest.h>

#include <cmath>

#include "weavesim/env.hpp"
#include "weavesim/world.hpp"

using namespace weave;

namespace {

SimConfig base_config() {
    SimConfig cfg;
    cfg.inflow.freeway_vphpl = 0.0;
    cfg.inflow.ramp_vphpl = 0.0;
    return cfg;
}

Vehicle make_vehicle(double pos, LaneId lane, double speed,
                     Route route = Route::ThroughFreeway) {
    Vehicle v;
    v.pos = pos;
    v.lane = lane;
    v.speed = speed;
    v.route = route;
    return v;
}

}  // namespace

TEST_SUITE("world") {
    TEST_CASE("stepping an empty world only advances the clock") {
        WorldState world(base_config());
        const auto out = world.step_world({});
        CHECK(out.empty());
        CHECK(world.time() == doctest::Approx(0.2));
        CHECK(world.vehicles().empty());
    }

    TEST_CASE("semi-implicit Euler update") {
        WorldState world(base_config());
        world.insert_vehicle(make_vehicle(100.0, 1, 10.0));
        StepCommand cmd;
        cmd.accel = 2.0;
        const auto out = world.step_world({cmd});
        CHECK(out[0].state.speed == doctest::Approx(10.4).epsilon(1e-12));
        CHECK(out[0].state.pos == doctest::Approx(102.08).epsilon(1e-12));
        CHECK(out[0].realized_accel == doctest::Approx(2.0));
    }

    TEST_CASE("speed never exceeds the lane limit") {
        SimConfig cfg = base_config();
        WorldState world(cfg);
        world.insert_vehicle(make_vehicle(50.0, 1, cfg.road.freeway_speed_limit));
        StepCommand cmd;
        cmd.accel = 4.0;
        const auto out = world.step_world({cmd});
        CHECK(out[0].state.speed <= cfg.road.freeway_speed_limit + 1e-12);
    }

    TEST_CASE("hard deceleration command emits an emergency brake event") {
        WorldState world(base_config());
        world.insert_vehicle(make_vehicle(100.0, 1, 20.0));
        StepCommand cmd;
        cmd.accel = -9.5;
        const auto out = world.step_world({cmd});
        CHECK(out[0].emergency_brake);
        CHECK(out[0].realized_accel == doctest::Approx(-9.5));
        CHECK((out[0].flags() & kEventEmergencyBrake) != 0);
    }

    TEST_CASE("deceleration at the threshold is not an emergency") {
        WorldState world(base_config());
        world.insert_vehicle(make_vehicle(100.0, 1, 20.0));
        StepCommand cmd;
        cmd.accel = -9.0;
        const auto out = world.step_world({cmd});
        CHECK_FALSE(out[0].emergency_brake);
    }

    TEST_CASE("vehicles retire past the downstream end and off-ramp") {
        WorldState world(base_config());
        const VehicleId through = world.insert_vehicle(make_vehicle(499.5, 1, 20.0));
        const VehicleId exiting =
            world.insert_vehicle(make_vehicle(399.5, world.config().road.aux_lane(), 20.0,
                                              Route::ExitOffRamp));
        const auto out = world.step_world({StepCommand{}, StepCommand{}});
        for (const auto& o : out) {
            CHECK(o.exited);
            CHECK(o.state.exit_time == doctest::Approx(0.2));
        }
        CHECK(world.vehicles().empty());
        CHECK(world.exited_count() == 2);
        CHECK(world.find(through) == nullptr);
        CHECK(world.find(exiting) == nullptr);
    }

    TEST_CASE("unknown vehicle id is a structural error") {
        WorldState world(base_config());
        CHECK_THROWS_AS(world.at(42), StructuralError);
    }

    TEST_CASE("command count must match vehicle count") {
        WorldState world(base_config());
        world.insert_vehicle(make_vehicle(100.0, 1, 10.0));
        CHECK_THROWS_AS(world.step_world({}), StructuralError);
    }
}

TEST_SUITE("spawning") {
    TEST_CASE("zero rate spawns nothing") {
        SimConfig cfg = base_config();
        WorldState world(cfg);
        Rng rng(1);
        for (int i = 0; i < 500; ++i) {
            world.spawn_inflow(rng);
            world.step_world(std::vector<StepCommand>(world.vehicles().size()));
        }
        CHECK(world.generated_count() == 0);
        CHECK(world.active_count() == 0);
    }

    TEST_CASE("identical seeds give identical spawn sequences") {
        SimConfig cfg = base_config();
        cfg.inflow.freeway_vphpl = 1200.0;
        cfg.inflow.ramp_vphpl = 1200.0;
        auto run = [&](std::uint64_t seed) {
            WorldState world(cfg);
            Rng rng(seed);
            std::vector<std::tuple<double, LaneId, double, int>> spawns;
            for (int i = 0; i < 300; ++i) {
                for (const auto& o : world.spawn_inflow(rng))
                    spawns.emplace_back(o.state.pos, o.state.lane, o.state.speed,
                                        static_cast<int>(o.state.route));
                const auto cmds = apply_actions(world, {});
                world.step_world(cmds);
            }
            return spawns;
        };
        CHECK(run(99) == run(99));
        CHECK(run(99) != run(100));
    }

    TEST_CASE("arrival volume matches the demand, conservation holds throughout") {
        SimConfig cfg = base_config();
        cfg.inflow.freeway_vphpl = 1200.0;
        cfg.inflow.ramp_vphpl = 1200.0;
        WorldState world(cfg);
        Rng rng(5);
        for (int i = 0; i < 1500; ++i) {  // 300 s
            world.spawn_inflow(rng);
            const auto cmds = apply_actions(world, {});
            world.step_world(cmds);
            CHECK(world.generated_count() ==
                  world.active_count() + world.exited_count() + world.queued_count());
        }
        // 4 entry lanes x 300 s / 3 s mean headway = 400 expected arrivals
        CHECK(world.generated_count() > 300);
        CHECK(world.generated_count() < 500);
        CHECK(world.exited_count() > 0);
    }
}

TEST_SUITE("lane_change_feasible") {
    TEST_CASE("empty target lane accepts the change") {
        WorldState world(base_config());
        const VehicleId id = world.insert_vehicle(make_vehicle(250.0, 1, 20.0));
        CHECK(lane_change_feasible(world.at(id), 0, world));
        CHECK(lane_change_feasible(world.at(id), 2, world));
    }

    TEST_CASE("occupied insertion interval is infeasible") {
        WorldState world(base_config());
        const VehicleId id = world.insert_vehicle(make_vehicle(250.0, 1, 20.0));
        world.insert_vehicle(make_vehicle(251.0, 0, 20.0));
        CHECK_FALSE(lane_change_feasible(world.at(id), 0, world));
    }

    TEST_CASE("follower forced past 8 m/s^2 is infeasible") {
        // frozen oracle: follower 25 m/s, mover 10 m/s, lag gap 28 m -> bound
        // -8.3075; widening to 33 m -> +1.39
        WorldState world(base_config());
        const VehicleId id = world.insert_vehicle(make_vehicle(300.0, 1, 10.0));
        const VehicleId follower = world.insert_vehicle(
            make_vehicle(300.0 - world.at(id).length - 28.0, 0, 25.0));
        CHECK_FALSE(lane_change_feasible(world.at(id), 0, world));
        CHECK(safe_accel_bound(25.0, 28.0, 10.0, world.config().safety()) ==
              doctest::Approx(-8.3075).epsilon(1e-9));

        WorldState world2(base_config());
        const VehicleId id2 = world2.insert_vehicle(make_vehicle(300.0, 1, 10.0));
        world2.insert_vehicle(make_vehicle(300.0 - world2.at(id2).length - 33.0, 0, 25.0));
        CHECK(lane_change_feasible(world2.at(id2), 0, world2));
    }

    TEST_CASE("the mover itself must not need an emergency stop") {
        WorldState world(base_config());
        const VehicleId id = world.insert_vehicle(make_vehicle(300.0, 1, 29.0));
        world.insert_vehicle(make_vehicle(312.0, 0, 0.0));  // stopped just ahead on target
        CHECK_FALSE(lane_change_feasible(world.at(id), 0, world));
    }

    TEST_CASE("non-adjacent or non-existent targets are structural errors") {
        WorldState world(base_config());
        const VehicleId id = world.insert_vehicle(make_vehicle(250.0, 0, 20.0));
        CHECK_THROWS_AS(lane_change_feasible(world.at(id), 2, world), StructuralError);
        const VehicleId leftmost = world.insert_vehicle(make_vehicle(100.0, 2, 20.0));
        CHECK_THROWS_AS(lane_change_feasible(world.at(leftmost), 3, world), StructuralError);
        // aux does not exist upstream of the on-ramp gore
        const VehicleId upstream = world.insert_vehicle(make_vehicle(150.0, 0, 20.0));
        CHECK_THROWS_AS(lane_change_feasible(world.at(upstream), world.config().road.aux_lane(),
                                             world),
                        StructuralError);
    }
}

TEST_SUITE("baseline driver") {
    TEST_CASE("no incentive on a uniform road") {
        SimConfig cfg = base_config();
        WorldState world(cfg);
        const VehicleId id = world.insert_vehicle(make_vehicle(250.0, 1, 25.0));
        world.insert_vehicle(make_vehicle(330.0, 0, 25.0));
        world.insert_vehicle(make_vehicle(330.0, 1, 25.0));
        world.insert_vehicle(make_vehicle(330.0, 2, 25.0));
        CHECK(baseline_lane_decision(world.at(id), world, cfg.driver) == LaneDecision::Stay);
    }

    TEST_CASE("exit vehicle dives right when the gap is free") {
        SimConfig cfg = base_config();
        WorldState world(cfg);
        const VehicleId id =
            world.insert_vehicle(make_vehicle(350.0, 2, 20.0, Route::ExitOffRamp));
        CHECK(baseline_lane_decision(world.at(id), world, cfg.driver) == LaneDecision::Right);
    }

    TEST_CASE("merging vehicle waits when the left gap is infeasible") {
        SimConfig cfg = base_config();
        WorldState world(cfg);
        const VehicleId id = world.insert_vehicle(
            make_vehicle(300.0, cfg.road.aux_lane(), 15.0, Route::EnterFromOnRamp));
        world.insert_vehicle(make_vehicle(301.0, 0, 15.0));
        CHECK(baseline_lane_intent(world.at(id), world, cfg.driver) == LaneDecision::Left);
        CHECK(baseline_lane_decision(world.at(id), world, cfg.driver) == LaneDecision::Stay);
    }

    TEST_CASE("merging vehicle brakes toward the auxiliary lane end") {
        SimConfig cfg = base_config();
        WorldState world(cfg);
        const VehicleId id = world.insert_vehicle(
            make_vehicle(390.0, cfg.road.aux_lane(), 15.0, Route::EnterFromOnRamp));
        CHECK(baseline_acceleration(world.at(id), world, cfg.driver) < -2.0);
    }
}
