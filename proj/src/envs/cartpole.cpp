#include "hdrl/envs/cartpole.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hdrl {

namespace {
double wrap_pi(double a) {
    a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    return a - std::numbers::pi;
}
}  // namespace

CartPoleState cartpole_euler_step(const CartPoleState& s, double force,
                                  const CartPoleConfig& cfg) {
    const double total_mass = cfg.cart_mass + cfg.pole_mass;
    const double pml = cfg.pole_mass * cfg.half_length;
    const double sin_t = std::sin(s.theta);
    const double cos_t = std::cos(s.theta);

    const double temp =
        (force + pml * s.theta_dot * s.theta_dot * sin_t) / total_mass;
    const double theta_acc =
        (cfg.gravity * sin_t - cos_t * temp) /
        (cfg.half_length *
         (4.0 / 3.0 - cfg.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pml * theta_acc * cos_t / total_mass;

    CartPoleState out;
    out.x = s.x + cfg.dt * s.x_dot;
    out.x_dot = s.x_dot + cfg.dt * x_acc;
    out.theta = wrap_pi(s.theta + cfg.dt * s.theta_dot);
    out.theta_dot = s.theta_dot + cfg.dt * theta_acc;
    if (!std::isfinite(out.x) || !std::isfinite(out.x_dot) ||
        !std::isfinite(out.theta) || !std::isfinite(out.theta_dot))
        throw std::runtime_error("cartpole dynamics diverged");
    return out;
}

Eigen::VectorXd CartPoleRp::observe() const {
    Eigen::VectorXd obs(4);
    obs << state_.x / cfg_.position_limit, state_.x_dot / 3.0,
        state_.theta / cfg_.angle_limit, state_.theta_dot / 3.0;
    return obs;
}

Eigen::VectorXd CartPoleRp::reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-cfg_.reset_range,
                                               cfg_.reset_range);
    state_.x = uni(rng);
    state_.x_dot = uni(rng);
    state_.theta = uni(rng);
    state_.theta_dot = uni(rng);
    steps_ = 0;
    done_ = false;
    return observe();
}

StepResult CartPoleRp::step(int action) {
    if (done_) throw std::logic_error("step after episode end; reset first");
    if (action < 0 || action >= num_actions())
        throw std::invalid_argument("invalid cartpole action");

    const double force = action == 1 ? cfg_.force_mag : -cfg_.force_mag;
    state_ = cartpole_euler_step(state_, force, cfg_);
    ++steps_;

    StepResult result;
    result.observation = observe();
    result.signal.reward =
        cfg_.reward_scale * 0.5 * (1.0 + std::cos(state_.theta));

    const bool failed = std::abs(state_.x) > cfg_.position_limit ||
                        std::abs(state_.theta) > cfg_.angle_limit;
    if (failed) {
        result.signal.punish = cfg_.punish_event;
        result.terminal = true;
    } else if (steps_ >= cfg_.max_steps) {
        result.truncated = true;
    }
    done_ = result.terminal || result.truncated;
    return result;
}

}  // namespace hdrl
