#include <doctest.h>

#include <cmath>

#include "weavesim/idm.hpp"
#include "weavesim/rng.hpp"

using namespace weave;

namespace {

DriverParams golden_params() {
    DriverParams p;
    p.desired_speed = 29.06;
    p.time_headway = 1.2;
    p.min_gap = 2.0;
    p.max_accel = 2.0;
    p.comfort_decel = 3.0;
    p.exponent = 4.0;
    return p;
}

}  // namespace

TEST_SUITE("idm") {
    TEST_CASE("free flow at desired speed gives zero acceleration") {
        DriverParams p = golden_params();
        CHECK(idm_acceleration(p.desired_speed, kNoLeader, 0.0, p) == doctest::Approx(0.0));
    }

    TEST_CASE("from rest on an empty road gives full acceleration") {
        DriverParams p = golden_params();
        CHECK(idm_acceleration(0.0, kNoLeader, 0.0, p) == doctest::Approx(p.max_accel));
    }

    TEST_CASE("golden hand evaluation") {
        // v0=29.06, v=15, dv=0, gap=30, s0=2, T=1.2, a=2, b=3, delta=4
        DriverParams p = golden_params();
        const double acc = idm_acceleration(15.0, 30.0, 15.0, p);
        CHECK(acc == doctest::Approx(0.9691358774741785).epsilon(1e-12));
    }

    TEST_CASE("rejects bad inputs") {
        DriverParams p = golden_params();
        CHECK_THROWS_AS(idm_acceleration(std::nan(""), 10.0, 0.0, p), DomainError);
        CHECK_THROWS_AS(idm_acceleration(10.0, 0.0, 0.0, p), DomainError);
        CHECK_THROWS_AS(idm_acceleration(10.0, -1.0, 0.0, p), DomainError);
        CHECK_THROWS_AS(idm_acceleration(-1.0, 10.0, 0.0, p), DomainError);
        CHECK_THROWS_AS(idm_acceleration(10.0, 10.0, std::nan(""), p), DomainError);
    }

    TEST_CASE("clamped to the physical braking floor") {
        DriverParams p = golden_params();
        const double acc = idm_acceleration(29.0, 0.5, 0.0, p);
        CHECK(acc == doctest::Approx(-9.81));
    }

    TEST_CASE("discrete stop distance, hand value") {
        // from 10 m/s at 9.81 m/s^2, dt 0.2: speeds 8.038, 6.076, ... -> 4.114 m
        CHECK(brake_stop_distance(10.0, 9.81, 0.2) == doctest::Approx(4.114).epsilon(1e-12));
        CHECK(brake_stop_distance(0.0, 9.81, 0.2) == 0.0);
    }

    TEST_CASE("stop distance matches step-by-step simulation") {
        Rng rng(21);
        for (int i = 0; i < 200; ++i) {
            const double v0 = rng.uniform(0.0, 30.0);
            double v = v0, d = 0.0;
            while (v > 0.0) {
                v = std::max(0.0, v - 9.81 * 0.2);
                d += v * 0.2;
            }
            CHECK(brake_stop_distance(v0, 9.81, 0.2) == doctest::Approx(d).epsilon(1e-12));
        }
    }
}

TEST_SUITE("safe_accel_bound") {
    const SafetyParams kSafety{2.0, 9.81, 4.0, 0.2};

    TEST_CASE("no leader returns max accel") {
        CHECK(safe_accel_bound(10.0, kNoLeader, 0.0, kSafety) == 4.0);
    }

    TEST_CASE("stopped behind stopped leader at min gap must hold position") {
        CHECK(safe_accel_bound(0.0, 2.0, 0.0, kSafety) == doctest::Approx(0.0));
    }

    TEST_CASE("golden hand evaluations") {
        // ego 20, gap 15, leader 10: the rule demands more than the physical
        // floor, so the bound clamps there
        CHECK(safe_accel_bound(20.0, 15.0, 10.0, kSafety) == doctest::Approx(-9.81));
        // interior case, frozen from the independent oracle
        CHECK(safe_accel_bound(20.0, 12.3, 15.0, kSafety) ==
              doctest::Approx(-5.073).epsilon(1e-9));
    }

    TEST_CASE("monotone in the gap") {
        Rng rng(31);
        for (int i = 0; i < 500; ++i) {
            const double v = rng.uniform(0.0, 30.0);
            const double lv = rng.uniform(0.0, 30.0);
            const double g1 = rng.uniform(0.0, 100.0);
            const double g2 = g1 + rng.uniform(0.0, 50.0);
            CHECK(safe_accel_bound(v, g2, lv, kSafety) >=
                  safe_accel_bound(v, g1, lv, kSafety) - 1e-12);
        }
    }

    TEST_CASE("following the bound never violates the standstill margin") {
        // worst case: the leader brakes as hard as physics allows from the
        // first step on; the follower always applies exactly the bound
        Rng rng(47);
        for (int trial = 0; trial < 300; ++trial) {
            double ego_v = rng.uniform(0.0, 30.0);
            double lead_v = rng.uniform(0.0, 30.0);
            // start from a state where stopping behind the leader is possible
            double gap = kSafety.min_gap + ego_v * kSafety.dt +
                         brake_stop_distance(ego_v, kSafety.phys_decel, kSafety.dt) +
                         rng.uniform(0.0, 40.0);
            for (int step = 0; step < 120; ++step) {
                const double a = safe_accel_bound(ego_v, gap, lead_v, kSafety);
                ego_v = std::max(0.0, ego_v + a * kSafety.dt);
                lead_v = std::max(0.0, lead_v - kSafety.phys_decel * kSafety.dt);
                gap += (lead_v - ego_v) * kSafety.dt;
                CHECK(gap >= kSafety.min_gap - 1e-9);
            }
        }
    }
}
