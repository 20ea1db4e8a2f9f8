// weavesim: train, evaluate and report on the cooperative lane-changing
// scenario. Exit codes: 0 success, 2 usage, 3 data/format, 4 runtime fault.

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <thread>

#include "weavesim/config.hpp"
#include "weavesim/policy_net.hpp"
#include "weavesim/render.hpp"

namespace fs = std::filesystem;
using namespace weave;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string inflow;
    long seed = -1;
    int episodes = -1;
    int workers = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "config file (key = value lines)");
    cmd->add_option("--seed", flags.seed, "base random seed");
    cmd->add_option("--inflow", flags.inflow,
                    "inflow vphpl or preset no_congestion/moderate/extreme");
    cmd->add_option("--workers", flags.workers, "parallel episode workers");
    cmd->add_option("--out", flags.out_dir, "output directory");
}

RunConfig resolve_config(const CommonFlags& flags) {
    RunConfig cfg =
        flags.config_path.empty() ? default_run_config() : load_config_file(flags.config_path);
    if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.episodes >= 0) cfg.episodes = flags.episodes;
    if (flags.workers >= 1) cfg.workers = flags.workers;
    if (!flags.inflow.empty()) apply_inflow_scenario(cfg, flags.inflow);
    return cfg;
}

void write_run_dir_echo(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "config_echo.cfg").string(), config_echo(cfg));
}

std::vector<EpisodeResult> run_episode_batch(Policy& policy, const EnvConfig& env_cfg,
                                             std::uint64_t base_seed, int episodes, int workers) {
    std::vector<EpisodeResult> results(episodes);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int n_threads = std::max(1, std::min(workers, episodes));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < episodes; i = next.fetch_add(1)) {
                const std::uint64_t seed =
                    Rng::derive(base_seed, {0xEAu, static_cast<std::uint64_t>(i)});
                results[i] = run_episode(policy, env_cfg, seed, CollectMode::None);
            }
        });
    }
    for (auto& th : pool) th.join();
    return results;
}

int cmd_evaluate(RunConfig cfg, const std::string& policy_arg, const std::string& out_dir,
                 bool dump_rewards) {
    cfg.policy = policy_arg;
    cfg.env.sim.rl_control = policy_arg != "baseline";
    cfg.validate();

    std::unique_ptr<Policy> policy;
    PolicyNet net;
    if (policy_arg == "baseline" || policy_arg == "random") {
        policy = std::make_unique<RandomPolicy>();
    } else {
        PolicyCheckpoint ck = load_checkpoint(policy_arg);
        net = std::move(ck.net);
        policy = std::make_unique<NeuralPolicy>(net, /*deterministic=*/true);
    }

    write_run_dir_echo(cfg, out_dir);
    const auto results = run_episode_batch(*policy, cfg.env, cfg.seed, cfg.episodes, cfg.workers);

    std::vector<MetricsRecord> records;
    for (int i = 0; i < static_cast<int>(results.size()); ++i) {
        const EpisodeResult& ep = results[i];
        char name[64];
        std::snprintf(name, sizeof(name), "episode_%03d.csv", i);
        write_text_file((fs::path(out_dir) / name).string(), episode_log_to_csv(ep.log));

        const DensityMap map = density_map(ep.log, cfg.env.sim.road);
        std::snprintf(name, sizeof(name), "density_%03d.csv", i);
        write_text_file((fs::path(out_dir) / name).string(), density_csv(map));
        std::snprintf(name, sizeof(name), "density_%03d.svg", i);
        write_text_file((fs::path(out_dir) / name).string(), density_svg(map, cfg.env.sim.dt));
        std::snprintf(name, sizeof(name), "trajectories_%03d.svg", i);
        write_text_file((fs::path(out_dir) / name).string(),
                        trajectories_svg(ep.log, cfg.env.sim.road));
        if (dump_rewards) {
            std::snprintf(name, sizeof(name), "rewards_%03d.csv", i);
            write_text_file((fs::path(out_dir) / name).string(),
                            reward_audit_csv(ep.reward_audit, cfg.env.sim.dt));
        }
        records.push_back(compute_metrics(ep.log, cfg.emissions));
    }
    write_text_file((fs::path(out_dir) / "metrics.csv").string(), metrics_csv(records));

    const AggregateStats agg = aggregate_metrics(records);
    std::string summary;
    char line[256];
    std::snprintf(line, sizeof(line), "episodes: %d   policy: %s   inflow: %g vphpl\n",
                  cfg.episodes, cfg.policy.c_str(), cfg.env.sim.inflow.freeway_vphpl);
    summary += line;
    auto row = [&](const char* label, double mean, double std) {
        std::snprintf(line, sizeof(line), "%-42s %12.4f  (std %.4f)\n", label, mean, std);
        summary += line;
    };
    row("throughput (vph)", agg.mean.throughput_vph, agg.stddev.throughput_vph);
    row("mean speed (m/s)", agg.mean.mean_speed_mps, agg.stddev.mean_speed_mps);
    row("mean travel time (s)", agg.mean.mean_travel_time_s, agg.stddev.mean_travel_time_s);
    row("stops per vehicle", agg.mean.stops_per_vehicle, agg.stddev.stops_per_vehicle);
    row("fuel efficiency (mpg)", agg.mean.fuel_efficiency_mpg, agg.stddev.fuel_efficiency_mpg);
    row("CO2 (g/mi)", agg.mean.co2_g_per_mi, agg.stddev.co2_g_per_mi);
    row("NOx (mg/mi)", agg.mean.nox_mg_per_mi, agg.stddev.nox_mg_per_mi);
    double mean_system_reward = 0.0;
    for (const auto& ep : results) mean_system_reward += ep.system_reward_total;
    if (!results.empty()) mean_system_reward /= results.size();
    std::snprintf(line, sizeof(line), "mean episode system reward: %.4f\n", mean_system_reward);
    summary += line;
    write_text_file((fs::path(out_dir) / "summary.txt").string(), summary);
    std::cout << summary;
    return 0;
}

int cmd_train(RunConfig cfg, const std::string& out_dir, const std::string& resume) {
    cfg.policy = "training";
    cfg.env.sim.rl_control = true;
    cfg.train.seed = cfg.seed;
    cfg.train.workers = cfg.workers;
    cfg.validate();
    write_run_dir_echo(cfg, out_dir);

    const TrainResult result = train(cfg.env, cfg.train, out_dir, resume,
                                     [](const IterationStats& s) {
                                         std::printf("iter %4d  steps %9ld  reward %12.2f  "
                                                     "clip %.3f  ploss %.5f  vloss %.3f%s\n",
                                                     s.iteration, s.env_steps_total,
                                                     s.mean_system_reward, s.clip_fraction,
                                                     s.policy_loss, s.value_loss,
                                                     s.degenerate ? "  [no transitions]" : "");
                                         std::fflush(stdout);
                                     });
    std::cout << "final checkpoint: " << result.final_checkpoint << '\n';
    return 0;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    std::map<int, std::vector<MetricsRecord>> baseline, rl;
    for (const auto& dir : run_dirs) {
        const RunConfig cfg = load_config_file((fs::path(dir) / "config_echo.cfg").string());
        const auto records =
            metrics_from_csv(read_text_file((fs::path(dir) / "metrics.csv").string()));
        const int inflow = static_cast<int>(cfg.env.sim.inflow.freeway_vphpl);
        auto& bucket = cfg.policy == "baseline" ? baseline : rl;
        auto& recs = bucket[inflow];
        recs.insert(recs.end(), records.begin(), records.end());
    }
    const ComparisonTable table = build_comparison(baseline, rl);
    const std::string text = comparison_table_text(table);
    std::cout << text;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / "comparison.txt").string(), text);
        write_text_file((fs::path(out_dir) / "comparison.csv").string(),
                        comparison_table_csv(table));
    }
    return 0;
}

int cmd_plot(const std::string& run_dir) {
    const RunConfig cfg = load_config_file((fs::path(run_dir) / "config_echo.cfg").string());
    int rendered = 0;
    for (int i = 0;; ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "episode_%03d.csv", i);
        const fs::path log_path = fs::path(run_dir) / name;
        if (!fs::exists(log_path)) break;
        const EpisodeLog log =
            episode_log_from_csv(read_text_file(log_path.string()), cfg.env.sim.dt);
        const DensityMap map = density_map(log, cfg.env.sim.road);
        std::snprintf(name, sizeof(name), "density_%03d.svg", i);
        write_text_file((fs::path(run_dir) / name).string(), density_svg(map, cfg.env.sim.dt));
        std::snprintf(name, sizeof(name), "trajectories_%03d.svg", i);
        write_text_file((fs::path(run_dir) / name).string(),
                        trajectories_svg(log, cfg.env.sim.road));
        ++rendered;
    }
    if (rendered == 0) throw DataError("no episode csv files found in " + run_dir);
    std::cout << "rendered " << rendered << " episode(s) in " << run_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freeway weaving-area cooperative lane-changing: simulator, PPO trainer and "
                 "evaluation harness"};
    app.require_subcommand(1);

    CommonFlags train_flags, eval_flags, base_flags;
    std::string resume, checkpoint, report_out;
    bool dump_rewards = false;
    std::vector<std::string> report_dirs;
    std::string plot_dir;
    int max_iterations = -1;

    CLI::App* train_cmd = app.add_subcommand("train", "train the shared PPO policy");
    add_common(train_cmd, train_flags);
    train_cmd->add_option("--max-iterations", max_iterations, "override train.max_iterations");
    train_cmd->add_option("--resume", resume, "checkpoint to resume from");

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "run evaluation episodes");
    add_common(eval_cmd, eval_flags);
    eval_cmd->add_option("--episodes", eval_flags.episodes, "number of episodes");
    eval_cmd->add_option("--checkpoint", checkpoint, "trained policy checkpoint");
    std::string eval_policy;
    eval_cmd->add_option("--policy", eval_policy,
                         "'baseline', 'random' or a checkpoint path (overrides --checkpoint)");
    eval_cmd->add_flag("--dump-rewards", dump_rewards, "write per-step reward breakdowns");

    CLI::App* base_cmd =
        app.add_subcommand("baseline", "evaluate the human-driver model (no RL)");
    add_common(base_cmd, base_flags);
    base_cmd->add_option("--episodes", base_flags.episodes, "number of episodes");

    CLI::App* report_cmd =
        app.add_subcommand("report", "baseline-vs-RL comparison across run directories");
    report_cmd->add_option("dirs", report_dirs, "run directories (baseline and RL per scenario)")
        ->required();
    report_cmd->add_option("--out", report_out, "directory for comparison.csv/.txt");

    CLI::App* plot_cmd = app.add_subcommand("plot", "re-render SVGs from archived episode CSVs");
    plot_cmd->add_option("dir", plot_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (train_cmd->parsed()) {
            RunConfig cfg = resolve_config(train_flags);
            if (max_iterations >= 0) cfg.train.max_iterations = max_iterations;
            const std::string out = train_flags.out_dir.empty() ? "train_run" : train_flags.out_dir;
            return cmd_train(cfg, out, resume);
        }
        if (eval_cmd->parsed()) {
            RunConfig cfg = resolve_config(eval_flags);
            std::string policy = !eval_policy.empty() ? eval_policy : checkpoint;
            if (policy.empty())
                throw ConfigError("evaluate: give --checkpoint or --policy");
            const std::string out = eval_flags.out_dir.empty() ? "eval_run" : eval_flags.out_dir;
            return cmd_evaluate(cfg, policy, out, dump_rewards);
        }
        if (base_cmd->parsed()) {
            RunConfig cfg = resolve_config(base_flags);
            const std::string out =
                base_flags.out_dir.empty() ? "baseline_run" : base_flags.out_dir;
            return cmd_evaluate(cfg, "baseline", out, dump_rewards);
        }
        if (report_cmd->parsed()) return cmd_report(report_dirs, report_out);
        if (plot_cmd->parsed()) return cmd_plot(plot_dir);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "runtime fault: " << e.what() << '\n';
        return 4;
    }
    return 2;
}
