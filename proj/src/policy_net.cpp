#include "weavesim/policy_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace weave {

namespace {

constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 1.0;

Eigen::MatrixXd orthogonal(int rows, int cols, double gain, Rng& rng) {
    Eigen::MatrixXd a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = rng.normal();
    if (rows >= cols) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
        return gain * q;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, rows);
    return gain * q.transpose();
}

}  // namespace

PolicyNet::PolicyNet(int obs_dim, int hidden) : obs_dim_(obs_dim), hidden_(hidden) {
    if (obs_dim < 1 || hidden < 1) throw StructuralError("PolicyNet: bad dimensions");
    actor_w1 = Eigen::MatrixXd::Zero(hidden, obs_dim);
    actor_b1 = Eigen::VectorXd::Zero(hidden);
    accel_w = Eigen::VectorXd::Zero(hidden);
    lane_w = Eigen::MatrixXd::Zero(3, hidden);
    lane_b = Eigen::Vector3d::Zero();
    critic_w1 = Eigen::MatrixXd::Zero(hidden, obs_dim);
    critic_b1 = Eigen::VectorXd::Zero(hidden);
    value_w = Eigen::VectorXd::Zero(hidden);
}

void PolicyNet::init(Rng& rng) {
    const double trunk_gain = std::sqrt(2.0);
    actor_w1 = orthogonal(hidden_, obs_dim_, trunk_gain, rng);
    accel_w = orthogonal(1, hidden_, 0.01, rng).row(0).transpose();
    lane_w = orthogonal(3, hidden_, 0.01, rng);
    critic_w1 = orthogonal(hidden_, obs_dim_, trunk_gain, rng);
    value_w = orthogonal(1, hidden_, 0.01, rng).row(0).transpose();
    actor_b1.setZero();
    lane_b.setZero();
    critic_b1.setZero();
    accel_b = 0.0;
    value_b = 0.0;
    log_std_param = 0.0;
}

int PolicyNet::param_count() const {
    return 2 * (hidden_ * obs_dim_ + hidden_)  // trunks
           + hidden_ + 1                       // accel head
           + 3 * hidden_ + 3                   // lane head
           + 1                                 // log_std
           + hidden_ + 1;                      // value head
}

Eigen::VectorXd PolicyNet::params() const {
    Eigen::VectorXd p(param_count());
    int k = 0;
    auto put_matrix = [&](const Eigen::MatrixXd& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) p(k++) = m(i, j);
    };
    auto put_vector = [&](const Eigen::VectorXd& v) {
        for (int i = 0; i < v.size(); ++i) p(k++) = v(i);
    };
    put_matrix(actor_w1);
    put_vector(actor_b1);
    put_vector(accel_w);
    p(k++) = accel_b;
    put_matrix(lane_w);
    put_vector(lane_b);
    p(k++) = log_std_param;
    put_matrix(critic_w1);
    put_vector(critic_b1);
    put_vector(value_w);
    p(k++) = value_b;
    return p;
}

void PolicyNet::set_params(const Eigen::VectorXd& p) {
    if (p.size() != param_count()) throw StructuralError("set_params: size mismatch");
    int k = 0;
    auto get_matrix = [&](Eigen::MatrixXd& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) m(i, j) = p(k++);
    };
    auto get_vector = [&](auto& v) {
        for (int i = 0; i < v.size(); ++i) v(i) = p(k++);
    };
    get_matrix(actor_w1);
    get_vector(actor_b1);
    get_vector(accel_w);
    accel_b = p(k++);
    get_matrix(lane_w);
    get_vector(lane_b);
    log_std_param = p(k++);
    get_matrix(critic_w1);
    get_vector(critic_b1);
    get_vector(value_w);
    value_b = p(k++);
}

double PolicyNet::log_std() const { return std::clamp(log_std_param, kLogStdMin, kLogStdMax); }

void PolicyNet::clamp_log_std() {
    log_std_param = std::clamp(log_std_param, kLogStdMin, kLogStdMax);
}

ActionDistribution PolicyNet::forward(const Eigen::Ref<const Eigen::VectorXd>& obs) const {
    if (obs.size() != obs_dim_) throw StructuralError("forward: observation size mismatch");
    ActionDistribution d;
    const Eigen::VectorXd h = (actor_w1 * obs + actor_b1).array().tanh();
    d.accel_mean = accel_w.dot(h) + accel_b;
    d.lane_logits = lane_w * h + lane_b;
    d.accel_log_std = log_std();
    const Eigen::VectorXd hc = (critic_w1 * obs + critic_b1).array().tanh();
    d.value = value_w.dot(hc) + value_b;
    return d;
}

ActionDistribution PolicyNet::forward(const Observation& obs) const {
    Eigen::VectorXd x(kObservationSize);
    for (int i = 0; i < kObservationSize; ++i) x(i) = obs[i];
    return forward(x);
}

PolicyNet::BatchCache PolicyNet::forward_batch(const Eigen::MatrixXd& x) const {
    if (x.cols() != obs_dim_) throw StructuralError("forward_batch: observation size mismatch");
    const int n = static_cast<int>(x.rows());
    BatchCache c;
    c.x = x;
    c.h.resize(n, hidden_);
    c.hc.resize(n, hidden_);
    c.mu.resize(n);
    c.logits.resize(n, 3);
    c.value.resize(n);
    // row-by-row through the same vector expressions as forward(), so a
    // stored rollout log-prob reproduces bitwise under unchanged parameters
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd obs = x.row(i).transpose();
        const Eigen::VectorXd h = (actor_w1 * obs + actor_b1).array().tanh();
        c.h.row(i) = h.transpose();
        c.mu(i) = accel_w.dot(h) + accel_b;
        c.logits.row(i) = (lane_w * h + lane_b).transpose();
        const Eigen::VectorXd hc = (critic_w1 * obs + critic_b1).array().tanh();
        c.hc.row(i) = hc.transpose();
        c.value(i) = value_w.dot(hc) + value_b;
    }
    return c;
}

Eigen::VectorXd PolicyNet::backward(const BatchCache& c, const HeadGrads& g) const {
    const int n = static_cast<int>(c.x.rows());
    if (g.d_mu.size() != n || g.d_log_std.size() != n || g.d_logits.rows() != n ||
        g.d_value.size() != n)
        throw StructuralError("backward: head gradient shape mismatch");

    // actor heads
    const Eigen::VectorXd d_accel_w = c.h.transpose() * g.d_mu;
    const double d_accel_b = g.d_mu.sum();
    const Eigen::MatrixXd d_lane_w = g.d_logits.transpose() * c.h;
    const Eigen::Vector3d d_lane_b = g.d_logits.colwise().sum();
    // actor trunk
    Eigen::MatrixXd dh = g.d_mu * accel_w.transpose() + g.d_logits * lane_w;
    dh.array() *= (1.0 - c.h.array().square());
    const Eigen::MatrixXd d_actor_w1 = dh.transpose() * c.x;
    const Eigen::VectorXd d_actor_b1 = dh.colwise().sum();
    const double d_log_std = g.d_log_std.sum();
    // critic
    Eigen::MatrixXd dhc = g.d_value * value_w.transpose();
    dhc.array() *= (1.0 - c.hc.array().square());
    const Eigen::MatrixXd d_critic_w1 = dhc.transpose() * c.x;
    const Eigen::VectorXd d_critic_b1 = dhc.colwise().sum();
    const Eigen::VectorXd d_value_w = c.hc.transpose() * g.d_value;
    const double d_value_b = g.d_value.sum();

    Eigen::VectorXd grad(param_count());
    int k = 0;
    auto put_matrix = [&](const Eigen::MatrixXd& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) grad(k++) = m(i, j);
    };
    auto put_vector = [&](const Eigen::VectorXd& v) {
        for (int i = 0; i < v.size(); ++i) grad(k++) = v(i);
    };
    put_matrix(d_actor_w1);
    put_vector(d_actor_b1);
    put_vector(d_accel_w);
    grad(k++) = d_accel_b;
    put_matrix(d_lane_w);
    put_vector(d_lane_b);
    grad(k++) = d_log_std;
    put_matrix(d_critic_w1);
    put_vector(d_critic_b1);
    put_vector(d_value_w);
    grad(k++) = d_value_b;

    if (!grad.allFinite())
        throw TrainingFault("backward: non-finite gradient (batch size " + std::to_string(n) +
                            ")");
    return grad;
}

Eigen::Vector3d softmax3(const Eigen::Vector3d& logits) {
    const double m = logits.maxCoeff();
    Eigen::Vector3d e = (logits.array() - m).exp();
    return e / e.sum();
}

SampledAction sample_action(const ActionDistribution& dist, Rng& rng, bool deterministic) {
    SampledAction out;
    const double sigma = std::exp(dist.accel_log_std);
    double u;
    int lane;
    if (deterministic) {
        u = dist.accel_mean;
        dist.lane_logits.maxCoeff(&lane);
    } else {
        u = dist.accel_mean + sigma * rng.normal();
        const Eigen::Vector3d p = softmax3(dist.lane_logits);
        const double r = rng.uniform01();
        lane = r < p(0) ? 0 : (r < p(0) + p(1) ? 1 : 2);
    }
    out.action.accel_raw = u;
    out.action.accel = std::clamp(u, kActionAccelMin, kActionAccelMax);
    out.action.lane = static_cast<LaneDecision>(lane);
    out.log_prob = log_prob_entropy(dist, out.action).log_prob;
    return out;
}

LogProbEntropy log_prob_entropy(const ActionDistribution& dist, const AgentAction& action) {
    const double sigma = std::exp(dist.accel_log_std);
    const double z = (action.accel_raw - dist.accel_mean) / sigma;
    const double lp_gauss = -0.5 * z * z - dist.accel_log_std - kHalfLog2Pi;

    const double m = dist.lane_logits.maxCoeff();
    const double lse = m + std::log((dist.lane_logits.array() - m).exp().sum());
    const int k = static_cast<int>(action.lane);
    const double lp_cat = dist.lane_logits(k) - lse;

    const Eigen::Vector3d p = softmax3(dist.lane_logits);
    double cat_entropy = 0.0;
    for (int j = 0; j < 3; ++j) cat_entropy -= p(j) * (dist.lane_logits(j) - lse);
    const double gauss_entropy = 0.5 + kHalfLog2Pi + dist.accel_log_std;

    return {lp_gauss + lp_cat, gauss_entropy + cat_entropy};
}

PolicyDecision NeuralPolicy::act(const Observation& obs, Rng& rng) {
    const ActionDistribution dist = net_.forward(obs);
    const SampledAction s = sample_action(dist, rng, deterministic_);
    return {s.action, s.log_prob, dist.value};
}

double NeuralPolicy::value(const Observation& obs) { return net_.forward(obs).value; }

// ---------------------------------------------------------------------------
// checkpoint io: versioned text, hexfloat values, bit-exact round trip

namespace {

void write_tensor(std::ofstream& out, const std::string& name, const Eigen::MatrixXd& m) {
    out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    char buf[40];
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%a", m(i, j));
            out << buf << (j + 1 == m.cols() ? '\n' : ' ');
        }
    }
}

}  // namespace

void PolicyNet::save_checkpoint(const std::string& path, long iteration, long env_steps,
                                const std::map<std::string, Eigen::VectorXd>& extra) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    out << "weavesim-checkpoint v1\n";
    out << "iteration " << iteration << '\n';
    out << "env_steps " << env_steps << '\n';
    out << "obs_dim " << obs_dim_ << '\n';
    out << "hidden " << hidden_ << '\n';
    write_tensor(out, "actor_w1", actor_w1);
    write_tensor(out, "actor_b1", actor_b1.transpose());
    write_tensor(out, "accel_w", accel_w.transpose());
    write_tensor(out, "accel_b", Eigen::MatrixXd::Constant(1, 1, accel_b));
    write_tensor(out, "lane_w", lane_w);
    write_tensor(out, "lane_b", lane_b.transpose());
    write_tensor(out, "log_std", Eigen::MatrixXd::Constant(1, 1, log_std_param));
    write_tensor(out, "critic_w1", critic_w1);
    write_tensor(out, "critic_b1", critic_b1.transpose());
    write_tensor(out, "value_w", value_w.transpose());
    write_tensor(out, "value_b", Eigen::MatrixXd::Constant(1, 1, value_b));
    for (const auto& [name, v] : extra) write_tensor(out, name, v.transpose());
    out << "end\n";
    if (!out) throw DataError("write failed: " + path);
}

PolicyCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "weavesim-checkpoint v1")
        throw DataError("checkpoint format/version mismatch in " + path +
                        " (expected 'weavesim-checkpoint v1')");

    long iteration = 0, env_steps = 0;
    int obs_dim = 0, hidden = 0;
    std::map<std::string, Eigen::MatrixXd> tensors;
    while (std::getline(in, line)) {
        if (line == "end") break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "iteration") ls >> iteration;
        else if (key == "env_steps") ls >> env_steps;
        else if (key == "obs_dim") ls >> obs_dim;
        else if (key == "hidden") ls >> hidden;
        else if (key == "tensor") {
            std::string name;
            int rows = 0, cols = 0;
            ls >> name >> rows >> cols;
            if (rows <= 0 || cols <= 0) throw DataError("checkpoint: bad tensor header");
            Eigen::MatrixXd m(rows, cols);
            for (int i = 0; i < rows; ++i) {
                if (!std::getline(in, line)) throw DataError("checkpoint: truncated tensor");
                std::istringstream row(line);
                std::string tok;
                for (int j = 0; j < cols; ++j) {
                    if (!(row >> tok)) throw DataError("checkpoint: short tensor row");
                    m(i, j) = std::strtod(tok.c_str(), nullptr);
                }
            }
            tensors[name] = std::move(m);
        } else {
            throw DataError("checkpoint: unknown entry '" + key + "'");
        }
    }
    if (obs_dim <= 0 || hidden <= 0) throw DataError("checkpoint: missing dimensions");

    auto take = [&](const std::string& name, int rows, int cols) {
        auto it = tensors.find(name);
        if (it == tensors.end()) throw DataError("checkpoint: missing tensor " + name);
        if (it->second.rows() != rows || it->second.cols() != cols)
            throw DataError("checkpoint: tensor " + name + " has wrong shape");
        Eigen::MatrixXd m = std::move(it->second);
        tensors.erase(it);
        return m;
    };

    PolicyCheckpoint ck{PolicyNet(obs_dim, hidden), iteration, env_steps, {}};
    ck.net.actor_w1 = take("actor_w1", hidden, obs_dim);
    ck.net.actor_b1 = take("actor_b1", 1, hidden).row(0).transpose();
    ck.net.accel_w = take("accel_w", 1, hidden).row(0).transpose();
    ck.net.accel_b = take("accel_b", 1, 1)(0, 0);
    ck.net.lane_w = take("lane_w", 3, hidden);
    ck.net.lane_b = take("lane_b", 1, 3).row(0).transpose();
    ck.net.log_std_param = take("log_std", 1, 1)(0, 0);
    ck.net.critic_w1 = take("critic_w1", hidden, obs_dim);
    ck.net.critic_b1 = take("critic_b1", 1, hidden).row(0).transpose();
    ck.net.value_w = take("value_w", 1, hidden).row(0).transpose();
    ck.net.value_b = take("value_b", 1, 1)(0, 0);
    for (auto& [name, m] : tensors) ck.extra[name] = m.row(0).transpose();
    return ck;
}

}  // namespace weave
