#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "weavesim/policy_net.hpp"

namespace weave {

struct TrainConfig {
    double learning_rate = 5e-5;
    double clip_epsilon = 0.2;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    int epochs_per_iter = 10;
    int minibatch_size = 2048;
    double value_coef = 0.5;
    double entropy_coef = 0.0;
    long sample_size = 16000;  // agent-steps collected per iteration
    int max_iterations = 50;
    int checkpoint_interval = 10;
    int hidden_units = 128;
    std::uint64_t seed = 1;
    int workers = 1;

    void validate() const {
        if (gamma <= 0.0 || gamma >= 1.0 || gae_lambda <= 0.0 || gae_lambda > 1.0)
            throw DomainError("train: gamma in (0,1), lambda in (0,1]");
        if (clip_epsilon <= 0.0) throw DomainError("train: clip_epsilon must be positive");
        if (learning_rate <= 0.0 || epochs_per_iter < 1 || minibatch_size < 1 ||
            sample_size < 1 || hidden_units < 1)
            throw DomainError("train: bad optimizer settings");
    }
};

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;
};

/// Generalized advantage estimation over one trajectory. `values` must hold
/// T+1 entries (bootstrap last), `dones` T entries. Throws StructuralError on
/// a length mismatch.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const unsigned char> dones, double gamma, double lambda);

/// Flat transition store for one training iteration.
struct RolloutBuffer {
    Eigen::MatrixXd obs;  // N x obs_dim
    Eigen::VectorXd accel_raw;
    std::vector<int> lane;
    Eigen::VectorXd log_prob_old;
    Eigen::VectorXd value_old;
    Eigen::VectorXd reward;
    Eigen::VectorXd advantage;
    Eigen::VectorXd ret;
    std::vector<unsigned char> done;

    int size() const { return static_cast<int>(lane.size()); }

    /// Shifts and scales advantages to mean 0, std 1 (exact, no epsilon);
    /// no-op when the spread is numerically zero.
    void normalize_advantages();
};

/// Runs GAE per trajectory and concatenates everything in the given order.
RolloutBuffer build_rollout_buffer(const std::vector<const AgentTrajectory*>& trajectories,
                                   int obs_dim, const TrainConfig& cfg);

/// Per-sample Eq.-style clipped surrogate: min(ratio*adv, clip(ratio)*adv).
double clipped_objective(double ratio, double advantage, double epsilon);

struct LossStats {
    double total = 0.0;
    double policy = 0.0;
    double value = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
};

/// Loss and exact gradient over the indexed minibatch: policy term plus
/// value_coef * MSE minus entropy_coef * entropy. Throws TrainingFault on a
/// non-finite ratio or loss.
LossStats ppo_loss(const PolicyNet& net, const RolloutBuffer& buf, std::span<const int> index,
                   const TrainConfig& cfg, Eigen::VectorXd* grad_out);

/// First/second-moment adaptive optimizer over the flat parameter vector.
class AdamOptimizer {
public:
    explicit AdamOptimizer(int n)
        : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);

    Eigen::VectorXd m, v;
    long t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

struct IterationStats {
    int iteration = 0;
    long env_steps_total = 0;  // cumulative agent-steps
    double mean_system_reward = 0.0;
    double clip_fraction = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    int episodes = 0;
    int transitions = 0;
    bool degenerate = false;  // no transitions collected, update skipped
};

/// One PPO iteration: collect episodes (in parallel, merged in deterministic
/// index order) until at least sample_size agent-steps, estimate advantages,
/// then run epochs x minibatch adaptive-gradient updates.
IterationStats train_iteration(PolicyNet& net, AdamOptimizer& adam, const EnvConfig& env_cfg,
                               const TrainConfig& cfg, int iteration, long env_steps_so_far);

struct TrainResult {
    std::vector<IterationStats> curve;
    std::string final_checkpoint;
};

/// Full training loop with checkpoint and reward-curve persistence. Resumes
/// from `resume_checkpoint` when non-empty.
TrainResult train(const EnvConfig& env_cfg, const TrainConfig& cfg, const std::string& out_dir,
                  const std::string& resume_checkpoint = "",
                  const std::function<void(const IterationStats&)>& on_iteration = {});

std::string reward_curve_csv(const std::vector<IterationStats>& curve);

}  // namespace weave
