// Python bindings for the weaving-area simulator, reward terms, PPO pieces
// and the evaluation metrics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "weavesim/config.hpp"
#include "weavesim/policy_net.hpp"
#include "weavesim/render.hpp"

namespace py = pybind11;
using namespace weave;

namespace {

RunConfig config_from_kwargs(const py::dict& overrides) {
    RunConfig cfg = default_run_config();
    for (auto item : overrides)
        apply_config_value(cfg, py::cast<std::string>(item.first),
                           py::cast<std::string>(py::str(item.second)));
    return cfg;
}

struct PyEpisode {
    EpisodeResult result;
    EnvConfig env;
    EmissionCoefficients emissions;
};

PyEpisode run_episode_py(const RunConfig& cfg, std::uint64_t seed, const std::string& policy,
                         bool deterministic) {
    PyEpisode out;
    out.env = cfg.env;
    out.emissions = cfg.emissions;
    out.env.sim.rl_control = policy != "baseline";
    if (policy == "baseline" || policy == "random") {
        RandomPolicy p;
        out.result = run_episode(p, out.env, seed);
    } else {
        const PolicyCheckpoint ck = load_checkpoint(policy);
        NeuralPolicy p(ck.net, deterministic);
        out.result = run_episode(p, out.env, seed);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "freeway weaving-area cooperative lane-changing: microscopic simulator, "
              "multi-agent PPO and evaluation metrics";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<StructuralError>(m, "StructuralError", PyExc_RuntimeError);
    py::register_exception<DataError>(m, "DataError", PyExc_IOError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<WorldFault>(m, "WorldFault", PyExc_RuntimeError);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init(&default_run_config))
        .def("set", &apply_config_value, py::arg("key"), py::arg("value"))
        .def("echo", &config_echo)
        .def("set_inflow", &apply_inflow_scenario, py::arg("preset_or_vphpl"))
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("episodes", &RunConfig::episodes)
        .def_readwrite("policy", &RunConfig::policy);

    m.def("load_config", &load_config_file, py::arg("path"));
    m.def("default_config", &default_run_config);
    m.def(
        "config",
        [](const py::dict& overrides) { return config_from_kwargs(overrides); },
        py::arg("overrides") = py::dict(), "Default config with `key = value` overrides.");

    m.def(
        "idm_acceleration",
        [](double ego_speed, double gap, double leader_speed, double v0, double T, double s0,
           double a, double b, double delta) {
            DriverParams p;
            p.desired_speed = v0;
            p.time_headway = T;
            p.min_gap = s0;
            p.max_accel = a;
            p.comfort_decel = b;
            p.exponent = delta;
            return idm_acceleration(ego_speed, gap, leader_speed, p);
        },
        py::arg("ego_speed"), py::arg("gap"), py::arg("leader_speed"),
        py::arg("v0") = 29.0576, py::arg("T") = 1.2, py::arg("s0") = 2.0, py::arg("a") = 2.0,
        py::arg("b") = 3.0, py::arg("delta") = 4.0);

    m.def(
        "safe_accel_bound",
        [](double ego_speed, double gap, double leader_speed, double s0, double b_phys,
           double a_max, double dt) {
            return safe_accel_bound(ego_speed, gap, leader_speed, {s0, b_phys, a_max, dt});
        },
        py::arg("ego_speed"), py::arg("gap"), py::arg("leader_speed"), py::arg("s0") = 2.0,
        py::arg("b_phys") = 9.81, py::arg("a_max") = 4.0, py::arg("dt") = 0.2);

    m.def("lane_reward", &lane_reward, py::arg("distance_into_weave"),
          py::arg("on_desired_lane"), py::arg("d_max") = 200.0);
    m.def("headway_penalty", &headway_penalty, py::arg("time_headway"),
          py::arg("min_headway") = 1.0);
    m.def(
        "emission_rate",
        [](double v, double a, const std::array<double, 6>& c) { return emission_rate(v, a, c); },
        py::arg("speed"), py::arg("accel"), py::arg("coefficients"));

    m.def(
        "compute_gae",
        [](const std::vector<double>& rewards, const std::vector<double>& values,
           const std::vector<int>& dones, double gamma, double lam) {
            std::vector<unsigned char> d(dones.begin(), dones.end());
            const GaeResult g = compute_gae(rewards, values, d, gamma, lam);
            return py::make_tuple(g.advantages, g.returns);
        },
        py::arg("rewards"), py::arg("values"), py::arg("dones"), py::arg("gamma") = 0.99,
        py::arg("lambda_") = 0.95);
    m.def("clipped_objective", &clipped_objective, py::arg("ratio"), py::arg("advantage"),
          py::arg("epsilon") = 0.2);

    py::class_<MetricsRecord>(m, "MetricsRecord")
        .def_readonly("throughput_vph", &MetricsRecord::throughput_vph)
        .def_readonly("mean_speed_mps", &MetricsRecord::mean_speed_mps)
        .def_readonly("mean_travel_time_s", &MetricsRecord::mean_travel_time_s)
        .def_readonly("stops_per_vehicle", &MetricsRecord::stops_per_vehicle)
        .def_readonly("fuel_efficiency_mpg", &MetricsRecord::fuel_efficiency_mpg)
        .def_readonly("co2_g_per_mi", &MetricsRecord::co2_g_per_mi)
        .def_readonly("nox_mg_per_mi", &MetricsRecord::nox_mg_per_mi)
        .def_readonly("empty", &MetricsRecord::empty)
        .def("__repr__", [](const MetricsRecord& r) {
            char buf[256];
            std::snprintf(buf, sizeof(buf),
                          "MetricsRecord(throughput=%.1f vph, speed=%.2f m/s, travel=%.1f s, "
                          "stops=%.3f, mpg=%.1f, co2=%.1f g/mi, nox=%.1f mg/mi)",
                          r.throughput_vph, r.mean_speed_mps, r.mean_travel_time_s,
                          r.stops_per_vehicle, r.fuel_efficiency_mpg, r.co2_g_per_mi,
                          r.nox_mg_per_mi);
            return std::string(buf);
        });

    py::class_<PyEpisode>(m, "Episode")
        .def_property_readonly("system_reward_total",
                               [](const PyEpisode& e) { return e.result.system_reward_total; })
        .def_property_readonly("system_reward_per_step",
                               [](const PyEpisode& e) { return e.result.system_reward_per_step; })
        .def_property_readonly("generated", [](const PyEpisode& e) { return e.result.generated; })
        .def_property_readonly("exited", [](const PyEpisode& e) { return e.result.exited; })
        .def_property_readonly("queued", [](const PyEpisode& e) { return e.result.queued; })
        .def("log_csv", [](const PyEpisode& e) { return episode_log_to_csv(e.result.log); })
        .def("metrics", [](const PyEpisode& e) { return compute_metrics(e.result.log, e.emissions); })
        .def("density",
             [](const PyEpisode& e) {
                 const DensityMap map = density_map(e.result.log, e.env.sim.road);
                 std::vector<std::vector<int>> rows(map.steps, std::vector<int>(map.bins));
                 for (int s = 0; s < map.steps; ++s)
                     for (int b = 0; b < map.bins; ++b) rows[s][b] = map.at(s, b);
                 return rows;
             })
        .def("density_svg",
             [](const PyEpisode& e) {
                 return density_svg(density_map(e.result.log, e.env.sim.road), e.env.sim.dt);
             })
        .def("trajectories_svg",
             [](const PyEpisode& e) { return trajectories_svg(e.result.log, e.env.sim.road); });

    m.def("run_episode", &run_episode_py, py::arg("config"), py::arg("seed") = 1,
          py::arg("policy") = "baseline", py::arg("deterministic") = true,
          "Run one episode with 'baseline', 'random' or a checkpoint path.",
          py::call_guard<py::gil_scoped_release>());

    py::class_<PolicyNet>(m, "PolicyNet")
        .def(py::init([](int obs_dim, int hidden, std::uint64_t seed) {
                 PolicyNet net(obs_dim, hidden);
                 Rng rng(Rng::derive(seed, {0x11u}));
                 net.init(rng);
                 return net;
             }),
             py::arg("obs_dim") = kObservationSize, py::arg("hidden") = 128,
             py::arg("seed") = 1)
        .def_static("load",
                    [](const std::string& path) { return load_checkpoint(path).net; },
                    py::arg("path"))
        .def("save",
             [](const PolicyNet& net, const std::string& path, long iteration) {
                 net.save_checkpoint(path, iteration, 0);
             },
             py::arg("path"), py::arg("iteration") = 0)
        .def("act",
             [](const PolicyNet& net, const std::vector<double>& obs, bool deterministic,
                std::uint64_t seed) {
                 if (static_cast<int>(obs.size()) != net.obs_dim())
                     throw StructuralError("act: observation size mismatch");
                 Observation o{};
                 for (std::size_t i = 0; i < obs.size(); ++i) o[i] = obs[i];
                 Rng rng(seed);
                 const SampledAction s = sample_action(net.forward(o), rng, deterministic);
                 return py::make_tuple(s.action.accel, static_cast<int>(s.action.lane));
             },
             py::arg("obs"), py::arg("deterministic") = true, py::arg("seed") = 0)
        .def("value",
             [](const PolicyNet& net, const std::vector<double>& obs) {
                 Observation o{};
                 for (std::size_t i = 0; i < obs.size() && i < o.size(); ++i) o[i] = obs[i];
                 return net.forward(o).value;
             },
             py::arg("obs"))
        .def_property_readonly("obs_dim", &PolicyNet::obs_dim)
        .def_property_readonly("hidden", &PolicyNet::hidden);

    m.def(
        "train",
        [](const RunConfig& cfg_in, const std::string& out_dir, int max_iterations) {
            RunConfig cfg = cfg_in;
            cfg.env.sim.rl_control = true;
            cfg.train.seed = cfg.seed;
            cfg.train.workers = cfg.workers;
            if (max_iterations >= 0) cfg.train.max_iterations = max_iterations;
            std::vector<double> rewards;
            const TrainResult r = train(cfg.env, cfg.train, out_dir, "",
                                        [&rewards](const IterationStats& s) {
                                            rewards.push_back(s.mean_system_reward);
                                        });
            return py::make_tuple(r.final_checkpoint, rewards);
        },
        py::arg("config"), py::arg("out_dir"), py::arg("max_iterations") = -1,
        "Train the shared policy; returns (final_checkpoint_path, reward_curve).",
        py::call_guard<py::gil_scoped_release>());

    m.attr("OBSERVATION_SIZE") = kObservationSize;
    m.attr("__version__") = "1.0.0";
}
