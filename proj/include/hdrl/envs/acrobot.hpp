#pragma once

#include <random>

#include "hdrl/envs/env.hpp"

namespace hdrl {

// Link angles measured from the downward position; theta1 = theta2 = 0
// is both links hanging down.
struct AcrobotState {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double dtheta1 = 0.0;
    double dtheta2 = 0.0;
};

struct AcrobotConfig {
    double link_mass_1 = 1.0;
    double link_mass_2 = 1.0;
    double link_length_1 = 1.0;
    double link_com_1 = 0.5;
    double link_com_2 = 0.5;
    double link_inertia = 1.0;  // about each CoM
    double gravity = 9.8;
    double torque_mag = 1.0;
    double dt = 0.2;      // control interval
    int substeps = 4;     // RK4 substeps per control interval
    double max_vel_1 = 4.0 * 3.14159265358979323846;
    double max_vel_2 = 9.0 * 3.14159265358979323846;
    double target_height = 1.0;   // tip height for the reward event
    double reward_event = 1.0;
    double punish_torque = 0.01;  // per unit applied |torque|
    double punish_step = 0.01;    // flat per-step cost
    double reset_range = 0.1;
    int max_steps = 200;
};

// RK4 over one control interval; no wrapping or velocity clamping.
AcrobotState acrobot_rk4_step(const AcrobotState& s, double torque,
                              const AcrobotConfig& cfg);

// Total mechanical energy; conserved by the unforced dynamics.
double acrobot_energy(const AcrobotState& s, const AcrobotConfig& cfg);

double acrobot_tip_height(const AcrobotState& s);

// Event reward whenever the tip rises above the target height; small
// continuous punishment every step. Episodes end only by truncation.
class AcrobotRp final : public Env {
public:
    explicit AcrobotRp(AcrobotConfig cfg = {}) : cfg_(cfg) {}

    Eigen::VectorXd reset(std::uint64_t seed) override;
    StepResult step(int action) override;

    int obs_dim() const override { return 6; }
    int num_actions() const override { return 3; }  // torque -1, 0, +1
    int horizon() const override { return cfg_.max_steps; }

    const AcrobotState& state() const { return state_; }
    const AcrobotConfig& config() const { return cfg_; }

private:
    Eigen::VectorXd observe() const;

    AcrobotConfig cfg_;
    AcrobotState state_;
    int steps_ = 0;
    bool done_ = true;
};

}  // namespace hdrl
