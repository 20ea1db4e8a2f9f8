#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "weavesim/env.hpp"
#include "weavesim/rng.hpp"

namespace weave {

inline constexpr double kHalfLog2Pi = 0.9189385332046727;  // ln(2*pi)/2

/// Head outputs of one forward pass.
struct ActionDistribution {
    double accel_mean = 0.0;
    double accel_log_std = 0.0;
    Eigen::Vector3d lane_logits = Eigen::Vector3d::Zero();
    double value = 0.0;
};

/// Shared actor-critic: two independent one-hidden-layer tanh trunks (actor
/// and critic), a Gaussian acceleration head with a global learnable
/// log-std, a 3-way lane-decision head and a scalar value head. All math in
/// double precision; gradients are exact and analytic.
class PolicyNet {
public:
    explicit PolicyNet(int obs_dim = kObservationSize, int hidden = 128);

    /// Orthogonal-style init, output layers scaled by 0.01, log-std 0.
    void init(Rng& rng);

    int obs_dim() const { return obs_dim_; }
    int hidden() const { return hidden_; }
    int param_count() const;

    /// Flat parameter vector; layout is actor_w1 (row-major), actor_b1,
    /// accel_w, accel_b, lane_w (row-major), lane_b, log_std, critic_w1,
    /// critic_b1, value_w, value_b.
    Eigen::VectorXd params() const;
    void set_params(const Eigen::VectorXd& p);

    double log_std() const;  // clamped to [-5, 1]
    void clamp_log_std();

    ActionDistribution forward(const Eigen::Ref<const Eigen::VectorXd>& obs) const;
    ActionDistribution forward(const Observation& obs) const;

    struct BatchCache {
        Eigen::MatrixXd x;       // N x obs_dim
        Eigen::MatrixXd h;       // N x hidden, actor tanh activations
        Eigen::MatrixXd hc;      // N x hidden, critic tanh activations
        Eigen::VectorXd mu;      // N
        Eigen::MatrixXd logits;  // N x 3
        Eigen::VectorXd value;   // N
    };
    BatchCache forward_batch(const Eigen::MatrixXd& x) const;

    /// Upstream gradients at the heads, one row/entry per sample.
    struct HeadGrads {
        Eigen::VectorXd d_mu;
        Eigen::VectorXd d_log_std;
        Eigen::MatrixXd d_logits;
        Eigen::VectorXd d_value;
    };

    /// Exact gradient of the scalar loss w.r.t. every parameter, flat, in
    /// params() order. Throws TrainingFault on a non-finite gradient.
    Eigen::VectorXd backward(const BatchCache& cache, const HeadGrads& grads) const;

    void save_checkpoint(const std::string& path, long iteration, long env_steps,
                         const std::map<std::string, Eigen::VectorXd>& extra = {}) const;

    // parameters (public for the optimizer and tests)
    Eigen::MatrixXd actor_w1;   // hidden x obs
    Eigen::VectorXd actor_b1;   // hidden
    Eigen::VectorXd accel_w;    // hidden
    double accel_b = 0.0;
    Eigen::MatrixXd lane_w;     // 3 x hidden
    Eigen::Vector3d lane_b;
    double log_std_param = 0.0;
    Eigen::MatrixXd critic_w1;  // hidden x obs
    Eigen::VectorXd critic_b1;  // hidden
    Eigen::VectorXd value_w;    // hidden
    double value_b = 0.0;

private:
    int obs_dim_;
    int hidden_;
};

/// Parsed checkpoint file: the network plus training progress and any extra
/// flat tensors (optimizer state).
struct PolicyCheckpoint {
    PolicyNet net;
    long iteration = 0;
    long env_steps = 0;
    std::map<std::string, Eigen::VectorXd> extra;
};

/// Throws DataError on a missing file or format/version mismatch.
PolicyCheckpoint load_checkpoint(const std::string& path);

Eigen::Vector3d softmax3(const Eigen::Vector3d& logits);

struct SampledAction {
    AgentAction action;
    double log_prob = 0.0;
};

/// Draws accel = clamp(mu + sigma*z, -8, 4) and a categorical lane decision.
/// The joint log-prob is evaluated on the pre-clamp sample. Deterministic
/// mode returns (clamp(mu), argmax lane).
SampledAction sample_action(const ActionDistribution& dist, Rng& rng,
                            bool deterministic = false);

struct LogProbEntropy {
    double log_prob = 0.0;
    double entropy = 0.0;
};

/// Factored log-prob of (accel_raw, lane) under the distribution, plus the
/// summed Gaussian and categorical entropy.
LogProbEntropy log_prob_entropy(const ActionDistribution& dist, const AgentAction& action);

/// Policy adapter used for rollouts and evaluation.
class NeuralPolicy : public Policy {
public:
    NeuralPolicy(const PolicyNet& net, bool deterministic)
        : net_(net), deterministic_(deterministic) {}
    PolicyDecision act(const Observation& obs, Rng& rng) override;
    double value(const Observation& obs) override;

private:
    const PolicyNet& net_;
    bool deterministic_;
};

}  // namespace weave
