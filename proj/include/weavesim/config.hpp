#pragma once

#include <string>
#include <vector>

#include "weavesim/env.hpp"
#include "weavesim/metrics.hpp"
#include "weavesim/ppo.hpp"

namespace weave {

/// Everything a run needs, resolvable entirely from defaults. Serialized as
/// `key = value` lines; unknown keys are hard errors.
struct RunConfig {
    EnvConfig env;
    TrainConfig train;
    EmissionCoefficients emissions;
    std::uint64_t seed = 1;
    int episodes = 30;
    int workers = 1;
    std::string policy = "baseline";  // "baseline", "random" or a checkpoint path

    void validate() const {
        env.sim.validate();
        train.validate();
        if (episodes < 0 || workers < 1) throw ConfigError("run: bad episodes/workers");
    }
};

RunConfig default_run_config();

/// Applies one key. Throws ConfigError naming the key when it is unknown or
/// its value does not parse.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` text ('#' comments allowed) on top of the given
/// base config.
RunConfig parse_config(const std::string& text, RunConfig base = default_run_config());

/// Loads a config file; a missing file raises ConfigError naming the path.
RunConfig load_config_file(const std::string& path);

/// Full resolved key set in a stable order; speed limits are printed to four
/// decimal places. Reparsing the echo reproduces the config.
std::string config_echo(const RunConfig& cfg);

/// Scenario presets: no_congestion (900), moderate (1200), extreme (1500).
/// Accepts a preset name or a number; sets both freeway and ramp inflow.
void apply_inflow_scenario(RunConfig& cfg, const std::string& preset_or_vphpl);

}  // namespace weave
