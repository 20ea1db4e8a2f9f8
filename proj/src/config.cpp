#include "weavesim/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace weave {

namespace {

struct KeyEntry {
    const char* key;
    const char* format;  // printf format for the echo
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for key '" + key + "': " + value);
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long x = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for key '" + key + "': " + value);
    }
}

std::string fmt(const char* format, double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, x);
    return buf;
}

#define NUM_KEY(name, format, field)                                                     \
    KeyEntry{name, format, [](const RunConfig& c) { return fmt(format, (double)(field)); }, \
             [](RunConfig& c, const std::string& v) {                                    \
                 field = static_cast<std::decay_t<decltype(field)>>(parse_double(name, v)); \
             }}

#define INT_KEY(name, field)                                                            \
    KeyEntry{name, "%d", [](const RunConfig& c) { return std::to_string(field); },      \
             [](RunConfig& c, const std::string& v) {                                   \
                 field = static_cast<std::decay_t<decltype(field)>>(parse_long(name, v)); \
             }}

const std::vector<KeyEntry>& registry() {
    static const std::vector<KeyEntry> keys = {
        NUM_KEY("road.mainline_length_m", "%.10g", c.env.sim.road.mainline_length),
        NUM_KEY("road.upstream_length_m", "%.10g", c.env.sim.road.upstream_length),
        NUM_KEY("road.weave_length_m", "%.10g", c.env.sim.road.weave_length),
        NUM_KEY("road.downstream_length_m", "%.10g", c.env.sim.road.downstream_length),
        INT_KEY("road.mainline_lanes", c.env.sim.road.mainline_lanes),
        NUM_KEY("road.freeway_speed_limit_mps", "%.4f", c.env.sim.road.freeway_speed_limit),
        NUM_KEY("road.ramp_speed_limit_mps", "%.4f", c.env.sim.road.ramp_speed_limit),
        NUM_KEY("road.control_zone_margin_m", "%.10g", c.env.sim.road.control_zone_margin),
        NUM_KEY("sim.dt_s", "%.10g", c.env.sim.dt),
        INT_KEY("sim.episode_steps", c.env.sim.episode_steps),
        NUM_KEY("sim.vehicle_length_m", "%.10g", c.env.sim.vehicle_length),
        NUM_KEY("sim.min_gap_m", "%.10g", c.env.sim.min_gap),
        NUM_KEY("sim.max_accel_mps2", "%.10g", c.env.sim.max_accel),
        NUM_KEY("sim.max_decel_mps2", "%.10g", c.env.sim.max_decel),
        NUM_KEY("sim.phys_decel_mps2", "%.10g", c.env.sim.phys_decel),
        NUM_KEY("sim.emergency_decel_mps2", "%.10g", c.env.sim.emergency_decel),
        NUM_KEY("inflow.freeway_vphpl", "%.10g", c.env.sim.inflow.freeway_vphpl),
        NUM_KEY("inflow.ramp_vphpl", "%.10g", c.env.sim.inflow.ramp_vphpl),
        NUM_KEY("inflow.exit_fraction", "%.10g", c.env.sim.inflow.exit_fraction),
        NUM_KEY("inflow.min_spawn_headway_s", "%.10g", c.env.sim.inflow.min_spawn_headway),
        NUM_KEY("driver.desired_speed_mps", "%.4f", c.env.sim.driver.desired_speed),
        NUM_KEY("driver.time_headway_s", "%.10g", c.env.sim.driver.time_headway),
        NUM_KEY("driver.min_gap_m", "%.10g", c.env.sim.driver.min_gap),
        NUM_KEY("driver.max_accel_mps2", "%.10g", c.env.sim.driver.max_accel),
        NUM_KEY("driver.comfort_decel_mps2", "%.10g", c.env.sim.driver.comfort_decel),
        NUM_KEY("driver.exponent", "%.10g", c.env.sim.driver.exponent),
        NUM_KEY("driver.lead_margin_m", "%.10g", c.env.sim.driver.lead_margin),
        NUM_KEY("driver.lag_margin_m", "%.10g", c.env.sim.driver.lag_margin),
        NUM_KEY("driver.incentive_threshold_mps2", "%.10g",
                c.env.sim.driver.incentive_threshold),
        NUM_KEY("driver.patience_s", "%.10g", c.env.sim.driver.patience),
        NUM_KEY("driver.change_cooldown_s", "%.10g", c.env.sim.driver.change_cooldown),
        NUM_KEY("reward.w_speed", "%.10g", c.env.rewards.speed),
        NUM_KEY("reward.w_lane", "%.10g", c.env.rewards.lane),
        NUM_KEY("reward.w_change", "%.10g", c.env.rewards.change),
        NUM_KEY("reward.w_improper", "%.10g", c.env.rewards.improper),
        NUM_KEY("reward.w_brake", "%.10g", c.env.rewards.brake),
        NUM_KEY("reward.w_headway", "%.10g", c.env.rewards.headway),
        NUM_KEY("reward.min_headway_s", "%.10g", c.env.rewards.min_headway),
        NUM_KEY("train.learning_rate", "%.10g", c.train.learning_rate),
        NUM_KEY("train.clip_epsilon", "%.10g", c.train.clip_epsilon),
        NUM_KEY("train.gamma", "%.10g", c.train.gamma),
        NUM_KEY("train.gae_lambda", "%.10g", c.train.gae_lambda),
        INT_KEY("train.epochs_per_iter", c.train.epochs_per_iter),
        INT_KEY("train.minibatch_size", c.train.minibatch_size),
        NUM_KEY("train.value_coef", "%.10g", c.train.value_coef),
        NUM_KEY("train.entropy_coef", "%.10g", c.train.entropy_coef),
        INT_KEY("train.sample_size", c.train.sample_size),
        INT_KEY("train.max_iterations", c.train.max_iterations),
        INT_KEY("train.checkpoint_interval", c.train.checkpoint_interval),
        INT_KEY("train.hidden_units", c.train.hidden_units),
        NUM_KEY("emissions.fuel.c0", "%.10g", c.emissions.fuel[0]),
        NUM_KEY("emissions.fuel.c1", "%.10g", c.emissions.fuel[1]),
        NUM_KEY("emissions.fuel.c2", "%.10g", c.emissions.fuel[2]),
        NUM_KEY("emissions.fuel.c3", "%.10g", c.emissions.fuel[3]),
        NUM_KEY("emissions.fuel.c4", "%.10g", c.emissions.fuel[4]),
        NUM_KEY("emissions.fuel.c5", "%.10g", c.emissions.fuel[5]),
        NUM_KEY("emissions.co2.c0", "%.10g", c.emissions.co2[0]),
        NUM_KEY("emissions.co2.c1", "%.10g", c.emissions.co2[1]),
        NUM_KEY("emissions.co2.c2", "%.10g", c.emissions.co2[2]),
        NUM_KEY("emissions.co2.c3", "%.10g", c.emissions.co2[3]),
        NUM_KEY("emissions.co2.c4", "%.10g", c.emissions.co2[4]),
        NUM_KEY("emissions.co2.c5", "%.10g", c.emissions.co2[5]),
        NUM_KEY("emissions.nox.c0", "%.10g", c.emissions.nox[0]),
        NUM_KEY("emissions.nox.c1", "%.10g", c.emissions.nox[1]),
        NUM_KEY("emissions.nox.c2", "%.10g", c.emissions.nox[2]),
        NUM_KEY("emissions.nox.c3", "%.10g", c.emissions.nox[3]),
        NUM_KEY("emissions.nox.c4", "%.10g", c.emissions.nox[4]),
        NUM_KEY("emissions.nox.c5", "%.10g", c.emissions.nox[5]),
        KeyEntry{"run.seed", "%s",
                 [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](RunConfig& c, const std::string& v) {
                     c.seed = static_cast<std::uint64_t>(parse_long("run.seed", v));
                 }},
        INT_KEY("run.episodes", c.episodes),
        INT_KEY("run.workers", c.workers),
        KeyEntry{"run.policy", "%s", [](const RunConfig& c) { return c.policy; },
                 [](RunConfig& c, const std::string& v) { c.policy = v; }},
    };
    return keys;
}

#undef NUM_KEY
#undef INT_KEY

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "config_version") {
        if (value != "1") throw ConfigError("unsupported config_version: " + value);
        return;
    }
    for (const auto& entry : registry()) {
        if (key == entry.key) {
            entry.set(cfg, value);
            return;
        }
    }
    throw ConfigError("unknown config key: '" + key + "'");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        apply_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_echo(const RunConfig& cfg) {
    std::string out = "config_version = 1\n";
    for (const auto& entry : registry()) {
        out += entry.key;
        out += " = ";
        out += entry.get(cfg);
        out += '\n';
    }
    return out;
}

void apply_inflow_scenario(RunConfig& cfg, const std::string& preset_or_vphpl) {
    double rate;
    if (preset_or_vphpl == "no_congestion") rate = 900.0;
    else if (preset_or_vphpl == "moderate") rate = 1200.0;
    else if (preset_or_vphpl == "extreme") rate = 1500.0;
    else rate = parse_double("--inflow", preset_or_vphpl);
    cfg.env.sim.inflow.freeway_vphpl = rate;
    cfg.env.sim.inflow.ramp_vphpl = rate;
}

}  // namespace weave
