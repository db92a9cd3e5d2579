#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>

namespace hdrl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// One-hidden-layer tanh network (or a plain linear map when hidden == 0)
// with a flat parameter view for TD-style updates and snapshotting.
class MlpHead {
public:
    MlpHead(int in_dim, int out_dim, int hidden, std::uint64_t seed,
            double init_scale = 0.1, double init_output_bias = 0.0);

    VectorXd forward(const VectorXd& input) const;

    // Gradient of out_grad . output with respect to the flat parameters.
    VectorXd backward(const VectorXd& input, const VectorXd& out_grad) const;

    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }
    int hidden_dim() const { return hidden_; }
    int param_count() const;

    VectorXd params() const;
    void set_params(const VectorXd& flat);
    void add_to_params(const VectorXd& flat_step);

    void save(std::ostream& os, const std::string& name) const;
    static MlpHead load(std::istream& is, std::string* name = nullptr);

private:
    void check_input(const VectorXd& input) const;

    int in_dim_;
    int out_dim_;
    int hidden_;
    MatrixXd w1_;  // hidden x in
    VectorXd b1_;
    MatrixXd w2_;  // out x (hidden or in)
    VectorXd b2_;
};

// Non-negative value head: V = max(0, raw).
class Critic {
public:
    // A small positive output bias keeps the rectifier alive at the
    // start; with bias 0 a critic whose raw output begins negative over
    // the visited region never escapes the zero subgradient.
    Critic(int in_dim, int hidden, std::uint64_t seed, double init_scale = 0.1,
           double init_output_bias = 0.05)
        : net_(in_dim, 1, hidden, seed, init_scale, init_output_bias) {}

    struct Output {
        double raw;
        double value;
    };

    Output forward(const VectorXd& features) const;

    // Semi-gradient TD step: params += lr * delta * grad(raw), with the
    // rectifier subgradient zero where raw < 0.
    void update(const VectorXd& features, double delta, double lr);

    MlpHead& net() { return net_; }
    const MlpHead& net() const { return net_; }

private:
    MlpHead net_;
};

// Softmax policy over a discrete action set.
class Policy {
public:
    Policy(int in_dim, int num_actions, int hidden, std::uint64_t seed,
           double init_scale = 0.1)
        : net_(in_dim, num_actions, hidden, seed, init_scale) {}

    VectorXd action_probs(const VectorXd& features) const;

    // Likelihood-ratio step: params += lr * advantage * grad(log pi(a)).
    void update(const VectorXd& features, int action, double advantage,
                double lr);

    int num_actions() const { return net_.out_dim(); }
    MlpHead& net() { return net_; }
    const MlpHead& net() const { return net_; }

private:
    MlpHead net_;
};

// Max relative error between the analytic parameter gradient of
// out_grad . output and its central-difference estimate.
double finite_diff_check(const MlpHead& head, const VectorXd& features,
                         const VectorXd& out_grad, double epsilon);

}  // namespace hdrl
