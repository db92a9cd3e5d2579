#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <utility>

#include "hdrl/approximator.hpp"
#include "hdrl/envs/env.hpp"
#include "hdrl/td_core.hpp"

namespace hdrl {

enum class AgentMode { hyperbolic, exponential };

struct AgentConfig {
    AgentMode mode = AgentMode::hyperbolic;
    HyperParams hyper{};
    double gamma_reward = 0.99;  // exponential mode
    double gamma_punish = 0.99;
    double critic_lr = 1e-3;
    double actor_lr = 1e-4;
    double ema_rate = 1e-3;
    bool compensate = true;  // (1 - avg gamma) signal scaling, hyperbolic mode
    int hidden = 32;
    double init_scale = 0.1;
    double init_output_bias = 0.05;  // critics only, keeps rectifier alive
    std::uint64_t seed = 0;
};

struct Transition {
    Eigen::VectorXd state;
    int action = 0;
    ChannelSignal signal;
    Eigen::VectorXd next_state;
    bool terminal = false;
};

struct StepDiagnostics {
    double delta_r = 0.0;
    double delta_q = 0.0;
    double gamma_r = 1.0;
    double gamma_q = 1.0;
    double v_r = 0.0;
    double v_q = 0.0;
    bool rejected = false;
};

// Reward-punishment actor-critic. The hyperbolic mode drives both value
// channels through the state-dependent discount; the exponential mode
// keeps the same two-critic structure with fixed discounts.
class Agent {
public:
    Agent(AgentConfig cfg, int obs_dim, int num_actions);

    int act(const Eigen::VectorXd& state_features);
    StepDiagnostics learn(const Transition& transition);

    double combined_value(const Eigen::VectorXd& state_features) const;

    // Current per-channel running average discounts (gamma_bar_r, gamma_bar_q).
    std::pair<double, double> snapshot_discount_averages() const;

    std::uint64_t steps_absorbed() const { return steps_; }
    const AgentConfig& config() const { return cfg_; }
    const RunningStats& reward_stats() const { return stats_r_; }
    const RunningStats& punish_stats() const { return stats_q_; }

    void save(std::ostream& os) const;
    void load(std::istream& is);

private:
    AgentConfig cfg_;
    Critic critic_r_;
    Critic critic_q_;
    Policy policy_;
    RunningStats stats_r_;
    RunningStats stats_q_;
    std::mt19937_64 rng_;
    std::uint64_t steps_ = 0;
};

}  // namespace hdrl
