#include "weavesim/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

namespace weave {

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const unsigned char> dones, double gamma, double lambda) {
    const std::size_t t_len = rewards.size();
    if (values.size() != t_len + 1 || dones.size() != t_len)
        throw StructuralError("compute_gae: values must have T+1 entries and dones T");

    GaeResult out;
    out.advantages.resize(t_len);
    out.returns.resize(t_len);
    double carry = 0.0;
    for (std::size_t i = t_len; i-- > 0;) {
        const double not_done = dones[i] ? 0.0 : 1.0;
        const double delta = rewards[i] + gamma * values[i + 1] * not_done - values[i];
        carry = delta + gamma * lambda * not_done * carry;
        out.advantages[i] = carry;
        out.returns[i] = carry + values[i];
    }
    return out;
}

void RolloutBuffer::normalize_advantages() {
    const int n = size();
    if (n < 2) return;
    const double mean = advantage.mean();
    const double var = (advantage.array() - mean).square().sum() / n;
    const double std = std::sqrt(var);
    if (std < 1e-12) return;
    advantage = (advantage.array() - mean) / std;
}

RolloutBuffer build_rollout_buffer(const std::vector<const AgentTrajectory*>& trajectories,
                                   int obs_dim, const TrainConfig& cfg) {
    long total = 0;
    for (const auto* t : trajectories) total += static_cast<long>(t->rewards.size());

    RolloutBuffer buf;
    buf.obs.resize(total, obs_dim);
    buf.accel_raw.resize(total);
    buf.lane.resize(total);
    buf.log_prob_old.resize(total);
    buf.value_old.resize(total);
    buf.reward.resize(total);
    buf.advantage.resize(total);
    buf.ret.resize(total);
    buf.done.resize(total);

    long row = 0;
    for (const auto* t : trajectories) {
        const std::size_t len = t->rewards.size();
        if (len == 0) continue;
        std::vector<double> values(t->values.begin(), t->values.end());
        values.push_back(t->terminated ? 0.0 : t->bootstrap_value);
        std::vector<unsigned char> dones(len, 0);
        if (t->terminated) dones.back() = 1;
        const GaeResult gae = compute_gae(t->rewards, values, dones, cfg.gamma, cfg.gae_lambda);

        for (std::size_t i = 0; i < len; ++i, ++row) {
            for (int j = 0; j < obs_dim; ++j) buf.obs(row, j) = t->obs[i][j];
            buf.accel_raw(row) = t->actions[i].accel_raw;
            buf.lane[row] = static_cast<int>(t->actions[i].lane);
            buf.log_prob_old(row) = t->log_probs[i];
            buf.value_old(row) = t->values[i];
            buf.reward(row) = t->rewards[i];
            buf.advantage(row) = gae.advantages[i];
            buf.ret(row) = gae.returns[i];
            buf.done[row] = dones[i];
        }
    }
    return buf;
}

double clipped_objective(double ratio, double advantage, double epsilon) {
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

LossStats ppo_loss(const PolicyNet& net, const RolloutBuffer& buf, std::span<const int> index,
                   const TrainConfig& cfg, Eigen::VectorXd* grad_out) {
    const int n = static_cast<int>(index.size());
    if (n == 0) throw StructuralError("ppo_loss: empty minibatch");

    Eigen::MatrixXd x(n, buf.obs.cols());
    for (int i = 0; i < n; ++i) x.row(i) = buf.obs.row(index[i]);
    const PolicyNet::BatchCache cache = net.forward_batch(x);

    const double log_std = net.log_std();
    const double sigma = std::exp(log_std);
    const double inv_b = 1.0 / n;

    PolicyNet::HeadGrads g;
    g.d_mu = Eigen::VectorXd::Zero(n);
    g.d_log_std = Eigen::VectorXd::Zero(n);
    g.d_logits = Eigen::MatrixXd::Zero(n, 3);
    g.d_value = Eigen::VectorXd::Zero(n);

    LossStats stats;
    int clipped_count = 0;
    for (int i = 0; i < n; ++i) {
        const int row = index[i];
        const double mu = cache.mu(i);
        const double u = buf.accel_raw(row);
        const double z = (u - mu) / sigma;
        const Eigen::Vector3d logits = cache.logits.row(i);
        const double mx = logits.maxCoeff();
        const double lse = mx + std::log((logits.array() - mx).exp().sum());
        const Eigen::Vector3d p = (logits.array() - lse).exp();
        const int k = buf.lane[row];

        const double lp_new = -0.5 * z * z - log_std - kHalfLog2Pi + logits(k) - lse;
        const double ratio = std::exp(lp_new - buf.log_prob_old(row));
        if (!std::isfinite(ratio))
            throw TrainingFault("ppo_loss: non-finite probability ratio at row " +
                                std::to_string(row));
        const double adv = buf.advantage(row);
        const double unclipped = ratio * adv;
        const double clipped = std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * adv;
        stats.policy -= std::min(unclipped, clipped) * inv_b;
        if (ratio < 1.0 - cfg.clip_epsilon || ratio > 1.0 + cfg.clip_epsilon) ++clipped_count;

        // gradient flows through the ratio only where the unclipped branch is active
        const double d_obj_d_lp = unclipped <= clipped ? unclipped : 0.0;
        const double d_lp_scale = -inv_b * d_obj_d_lp;
        g.d_mu(i) += d_lp_scale * (z / sigma);
        g.d_log_std(i) += d_lp_scale * (z * z - 1.0);
        for (int j = 0; j < 3; ++j) g.d_logits(i, j) += d_lp_scale * ((j == k ? 1.0 : 0.0) - p(j));

        // value term
        const double diff = cache.value(i) - buf.ret(row);
        stats.value += diff * diff * inv_b;
        g.d_value(i) = cfg.value_coef * 2.0 * diff * inv_b;

        // entropy bonus
        double cat_entropy = 0.0;
        for (int j = 0; j < 3; ++j) cat_entropy -= p(j) * (logits(j) - lse);
        const double entropy = 0.5 + kHalfLog2Pi + log_std + cat_entropy;
        stats.entropy += entropy * inv_b;
        if (cfg.entropy_coef != 0.0) {
            g.d_log_std(i) += -cfg.entropy_coef * inv_b;
            for (int j = 0; j < 3; ++j)
                g.d_logits(i, j) += -cfg.entropy_coef * inv_b * (-p(j) * (logits(j) - lse + cat_entropy));
        }
    }

    stats.total = stats.policy + cfg.value_coef * stats.value - cfg.entropy_coef * stats.entropy;
    stats.clip_fraction = static_cast<double>(clipped_count) / n;
    if (!std::isfinite(stats.total)) throw TrainingFault("ppo_loss: non-finite loss");

    if (grad_out) *grad_out = net.backward(cache, g);
    return stats;
}

void AdamOptimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
    if (params.size() != m.size() || grad.size() != m.size())
        throw StructuralError("AdamOptimizer: size mismatch");
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    params.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

namespace {

long trajectory_steps(const EpisodeResult& ep) {
    long n = 0;
    for (const auto& t : ep.trajectories) n += static_cast<long>(t.rewards.size());
    return n;
}

}  // namespace

IterationStats train_iteration(PolicyNet& net, AdamOptimizer& adam, const EnvConfig& env_cfg,
                               const TrainConfig& cfg, int iteration, long env_steps_so_far) {
    cfg.validate();
    IterationStats stats;
    stats.iteration = iteration;

    // ---- rollout collection: episodes merge in index order, so the result
    // does not depend on the worker count
    std::vector<EpisodeResult> episodes;
    long collected = 0;
    int next_index = 0;
    const int wave = std::max(1, cfg.workers);
    while (collected < cfg.sample_size) {
        std::vector<EpisodeResult> results(wave);
        std::vector<std::thread> threads;
        for (int j = 0; j < wave; ++j) {
            const std::uint64_t seed = Rng::derive(
                cfg.seed, {0xE9u, static_cast<std::uint64_t>(iteration),
                           static_cast<std::uint64_t>(next_index + j)});
            threads.emplace_back([&results, j, &net, &env_cfg, seed]() {
                NeuralPolicy policy(net, false);
                results[j] = run_episode(policy, env_cfg, seed, CollectMode::Training);
            });
        }
        for (auto& th : threads) th.join();
        long wave_contribution = 0;
        for (int j = 0; j < wave && collected < cfg.sample_size; ++j) {
            const long steps = trajectory_steps(results[j]);
            wave_contribution += steps;
            collected += steps;
            episodes.push_back(std::move(results[j]));
            ++next_index;
        }
        if (wave_contribution == 0) break;  // degenerate scenario (e.g. zero inflow)
    }

    stats.episodes = static_cast<int>(episodes.size());
    stats.transitions = static_cast<int>(collected);
    stats.env_steps_total = env_steps_so_far + collected;

    double reward_sum = 0.0;
    for (const auto& ep : episodes) reward_sum += ep.system_reward_total;
    stats.mean_system_reward = episodes.empty() ? 0.0 : reward_sum / episodes.size();

    if (collected == 0) {
        stats.degenerate = true;
        return stats;
    }

    std::vector<const AgentTrajectory*> trajs;
    for (const auto& ep : episodes)
        for (const auto& t : ep.trajectories) trajs.push_back(&t);
    RolloutBuffer buf = build_rollout_buffer(trajs, net.obs_dim(), cfg);
    buf.normalize_advantages();

    Rng shuffle_rng(Rng::derive(cfg.seed, {0xADu, static_cast<std::uint64_t>(iteration)}));
    std::vector<int> order(buf.size());
    std::iota(order.begin(), order.end(), 0);

    Eigen::VectorXd params = net.params();
    Eigen::VectorXd grad;
    double clip_sum = 0.0, policy_sum = 0.0, value_sum = 0.0, entropy_sum = 0.0;
    long batches = 0;
    for (int epoch = 0; epoch < cfg.epochs_per_iter; ++epoch) {
        for (int i = buf.size() - 1; i > 0; --i)
            std::swap(order[i], order[shuffle_rng.uniform_int(i + 1)]);
        for (int start = 0; start < buf.size(); start += cfg.minibatch_size) {
            const int len = std::min<int>(cfg.minibatch_size, buf.size() - start);
            const LossStats ls =
                ppo_loss(net, buf, std::span<const int>(order.data() + start, len), cfg, &grad);
            adam.step(params, grad, cfg.learning_rate);
            net.set_params(params);
            net.clamp_log_std();
            params = net.params();
            clip_sum += ls.clip_fraction;
            policy_sum += ls.policy;
            value_sum += ls.value;
            entropy_sum += ls.entropy;
            ++batches;
        }
    }
    stats.clip_fraction = clip_sum / batches;
    stats.policy_loss = policy_sum / batches;
    stats.value_loss = value_sum / batches;
    stats.entropy = entropy_sum / batches;
    return stats;
}

std::string reward_curve_csv(const std::vector<IterationStats>& curve) {
    std::string out =
        "iteration,total_env_steps,mean_system_reward,clip_fraction,policy_loss,value_loss\n";
    char buf[256];
    for (const auto& s : curve) {
        std::snprintf(buf, sizeof(buf), "%d,%ld,%.10g,%.10g,%.10g,%.10g\n", s.iteration,
                      s.env_steps_total, s.mean_system_reward, s.clip_fraction, s.policy_loss,
                      s.value_loss);
        out += buf;
    }
    return out;
}

TrainResult train(const EnvConfig& env_cfg, const TrainConfig& cfg, const std::string& out_dir,
                  const std::string& resume_checkpoint,
                  const std::function<void(const IterationStats&)>& on_iteration) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    PolicyNet net(kObservationSize, cfg.hidden_units);
    AdamOptimizer adam(net.param_count());
    int start_iter = 0;
    long env_steps = 0;
    if (!resume_checkpoint.empty()) {
        auto ck = load_checkpoint(resume_checkpoint);
        if (ck.net.hidden() != cfg.hidden_units)
            throw DataError("resume checkpoint hidden size differs from config");
        net = std::move(ck.net);
        start_iter = static_cast<int>(ck.iteration);
        env_steps = ck.env_steps;
        if (auto it = ck.extra.find("adam_m"); it != ck.extra.end()) adam.m = it->second;
        if (auto it = ck.extra.find("adam_v"); it != ck.extra.end()) adam.v = it->second;
        if (auto it = ck.extra.find("adam_t"); it != ck.extra.end())
            adam.t = static_cast<long>(it->second(0));
    } else {
        Rng init_rng(Rng::derive(cfg.seed, {0x11u}));
        net.init(init_rng);
    }

    auto write_checkpoint = [&](const std::string& name, int iteration) {
        std::map<std::string, Eigen::VectorXd> extra;
        extra["adam_m"] = adam.m;
        extra["adam_v"] = adam.v;
        extra["adam_t"] = Eigen::VectorXd::Constant(1, static_cast<double>(adam.t));
        net.save_checkpoint((fs::path(out_dir) / name).string(), iteration, env_steps, extra);
    };

    TrainResult result;
    write_checkpoint("checkpoint_initial.ckpt", start_iter);

    const fs::path curve_path = fs::path(out_dir) / "reward_curve.csv";
    for (int iter = start_iter; iter < cfg.max_iterations; ++iter) {
        IterationStats stats = train_iteration(net, adam, env_cfg, cfg, iter, env_steps);
        env_steps = stats.env_steps_total;
        result.curve.push_back(stats);
        if (on_iteration) on_iteration(stats);

        std::ofstream curve(curve_path);
        curve << reward_curve_csv(result.curve);

        if (cfg.checkpoint_interval > 0 && (iter + 1) % cfg.checkpoint_interval == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "checkpoint_%04d.ckpt", iter + 1);
            write_checkpoint(name, iter + 1);
        }
    }
    write_checkpoint("checkpoint_final.ckpt", cfg.max_iterations);
    result.final_checkpoint = (fs::path(out_dir) / "checkpoint_final.ckpt").string();

    std::ofstream curve(curve_path);
    curve << reward_curve_csv(result.curve);
    if (!curve) throw DataError("cannot write reward curve: " + curve_path.string());
    return result;
}

}  // namespace weave
