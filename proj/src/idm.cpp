#include "weavesim/idm.hpp"

#include <algorithm>
#include <cmath>

namespace weave {

double idm_acceleration(double ego_speed, double gap, double leader_speed,
                        const DriverParams& params, double phys_decel) {
    if (!std::isfinite(ego_speed) || std::isnan(gap) || std::isnan(leader_speed))
        throw DomainError("idm_acceleration: non-finite input");
    if (ego_speed < 0.0) throw DomainError("idm_acceleration: negative speed");

    const double free_flow =
        1.0 - std::pow(ego_speed / params.desired_speed, params.exponent);

    double acc;
    if (gap >= kNoLeader || std::isinf(gap)) {
        acc = params.max_accel * free_flow;
    } else {
        if (gap <= 0.0) throw DomainError("idm_acceleration: gap must be positive");
        if (!std::isfinite(leader_speed))
            throw DomainError("idm_acceleration: non-finite leader speed");
        const double dv = ego_speed - leader_speed;
        const double s_star =
            params.min_gap +
            std::max(0.0, ego_speed * params.time_headway +
                              ego_speed * dv /
                                  (2.0 * std::sqrt(params.max_accel * params.comfort_decel)));
        acc = params.max_accel * (free_flow - (s_star / gap) * (s_star / gap));
    }
    return std::clamp(acc, -phys_decel, params.max_accel);
}

double brake_stop_distance(double speed, double decel, double dt) {
    // closed form of sum_{k>=1} max(0, u - k*b*dt)*dt
    if (speed <= 0.0) return 0.0;
    const double beta = decel * dt;
    const double m = std::floor(speed / beta);
    return dt * (m * speed - beta * m * (m + 1.0) * 0.5);
}

double max_safe_next_speed(double reach, double decel, double dt) {
    if (reach <= 0.0) return 0.0;
    if (reach >= kNoLeader || std::isinf(reach)) return kNoLeader;
    const double beta = decel * dt;
    // f(v') = dt*(m+1)*(v' - beta*m/2) on the branch v' in [m*beta, (m+1)*beta);
    // walk branches until reach fits. f(m*beta) = dt*beta*m*(m+1)/2.
    double m = 0.0;
    while (dt * beta * (m + 1.0) * (m + 2.0) * 0.5 <= reach) m += 1.0;
    return reach / (dt * (m + 1.0)) + beta * m * 0.5;
}

double safe_accel_bound(double ego_speed, double leader_gap, double leader_speed,
                        const SafetyParams& safety) {
    if (std::isnan(ego_speed) || std::isnan(leader_gap) || std::isnan(leader_speed))
        throw DomainError("safe_accel_bound: non-finite input");
    if (leader_gap >= kNoLeader || std::isinf(leader_gap)) return safety.max_accel;

    const double reach = leader_gap - safety.min_gap +
                         brake_stop_distance(leader_speed, safety.phys_decel, safety.dt);
    const double v_next = max_safe_next_speed(reach, safety.phys_decel, safety.dt);
    const double bound = (v_next - ego_speed) / safety.dt;
    return std::clamp(bound, -safety.phys_decel, safety.max_accel);
}

}  // namespace weave
