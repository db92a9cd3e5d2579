#pragma once

#include <random>

#include "hdrl/envs/env.hpp"

namespace hdrl {

// State: [x, x_dot, theta, theta_dot], theta = 0 upright.
struct CartPoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
};

struct CartPoleConfig {
    double gravity = 9.8;
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double half_length = 0.5;  // pole pivot-to-CoM distance
    double force_mag = 10.0;
    double dt = 0.02;
    double position_limit = 2.4;
    double angle_limit = 0.21;  // rad
    double reward_scale = 1.0;  // scales the (1+cos)/2 shaping
    double punish_event = 1.0;  // signal on the failing step
    double reset_range = 0.05;
    int max_steps = 500;
};

// One Euler step of the standard cart-pole equations of motion.
CartPoleState cartpole_euler_step(const CartPoleState& s, double force,
                                  const CartPoleConfig& cfg);

// Continuous reward (1+cos theta)/2 every step; unit punishment on the
// step that leaves the position/angle box, which also terminates.
class CartPoleRp final : public Env {
public:
    explicit CartPoleRp(CartPoleConfig cfg = {}) : cfg_(cfg) {}

    Eigen::VectorXd reset(std::uint64_t seed) override;
    StepResult step(int action) override;

    int obs_dim() const override { return 4; }
    int num_actions() const override { return 2; }  // push left / right
    int horizon() const override { return cfg_.max_steps; }

    const CartPoleState& state() const { return state_; }
    const CartPoleConfig& config() const { return cfg_; }

private:
    Eigen::VectorXd observe() const;

    CartPoleConfig cfg_;
    CartPoleState state_;
    int steps_ = 0;
    bool done_ = true;
};

}  // namespace hdrl
