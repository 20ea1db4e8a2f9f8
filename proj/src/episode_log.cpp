#include "weavesim/episode_log.hpp"

#include <cstdio>
#include <sstream>

#include "weavesim/errors.hpp"

namespace weave {

std::string route_name(Route r) {
    switch (r) {
        case Route::ThroughFreeway: return "through";
        case Route::ExitOffRamp: return "exit";
        case Route::EnterFromOnRamp: return "onramp";
    }
    return "through";
}

Route route_from_name(const std::string& name) {
    if (name == "through") return Route::ThroughFreeway;
    if (name == "exit") return Route::ExitOffRamp;
    if (name == "onramp") return Route::EnterFromOnRamp;
    throw DataError("unknown route name: " + name);
}

std::string event_flags_string(unsigned flags) {
    std::string s;
    if (flags & kEventSpawned) s += 'S';
    if (flags & kEventLaneChanged) s += 'L';
    if (flags & kEventEmergencyBrake) s += 'B';
    if (flags & kEventExited) s += 'X';
    return s;
}

unsigned event_flags_from_string(const std::string& s) {
    unsigned flags = 0;
    for (char c : s) {
        switch (c) {
            case 'S': flags |= kEventSpawned; break;
            case 'L': flags |= kEventLaneChanged; break;
            case 'B': flags |= kEventEmergencyBrake; break;
            case 'X': flags |= kEventExited; break;
            default: throw DataError(std::string("unknown event flag: ") + c);
        }
    }
    return flags;
}

std::string episode_log_to_csv(const EpisodeLog& log) {
    std::string out = "time_s,vehicle_id,lane,pos_m,speed_mps,accel_mps2,route,event_flags\n";
    char buf[160];
    for (const auto& r : log.rows) {
        std::snprintf(buf, sizeof(buf), "%.1f,%llu,%d,%.4f,%.4f,%.4f,%s,%s\n", log.time_of(r),
                      static_cast<unsigned long long>(r.id), r.lane, r.pos, r.speed, r.accel,
                      route_name(r.route).c_str(), event_flags_string(r.flags).c_str());
        out += buf;
    }
    return out;
}

EpisodeLog episode_log_from_csv(const std::string& csv, double dt) {
    EpisodeLog log;
    log.dt = dt;
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("time_s,", 0) != 0)
        throw DataError("episode log csv: missing header");
    int max_step = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        LogRow r;
        auto next = [&]() {
            if (!std::getline(ls, field, ',')) throw DataError("episode log csv: short row");
            return field;
        };
        const double t = std::stod(next());
        r.id = std::stoull(next());
        r.lane = std::stoi(next());
        r.pos = std::stod(next());
        r.speed = std::stod(next());
        r.accel = std::stod(next());
        r.route = route_from_name(next());
        std::string flags;
        std::getline(ls, flags, ',');
        r.flags = event_flags_from_string(flags);
        r.step = static_cast<int>(t / log.dt + 0.5) - 1;
        max_step = std::max(max_step, r.step);
        log.rows.push_back(r);
    }
    log.episode_steps = max_step + 1;
    return log;
}

}  // namespace weave
