#include "hdrl/envs/acrobot.hpp"

#include <algorithm>
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

struct Deriv {
    double dtheta1, dtheta2, ddtheta1, ddtheta2;
};

Deriv derivatives(const AcrobotState& s, double torque,
                  const AcrobotConfig& c) {
    const double m1 = c.link_mass_1, m2 = c.link_mass_2;
    const double l1 = c.link_length_1;
    const double lc1 = c.link_com_1, lc2 = c.link_com_2;
    const double I = c.link_inertia;
    const double g = c.gravity;
    const double t1 = s.theta1, t2 = s.theta2;
    const double d1t = s.dtheta1, d2t = s.dtheta2;

    const double d1 = m1 * lc1 * lc1 +
                      m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(t2)) +
                      2.0 * I;
    const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(t2)) + I;
    const double phi2 =
        m2 * lc2 * g * std::cos(t1 + t2 - std::numbers::pi / 2.0);
    const double phi1 = -m2 * l1 * lc2 * d2t * d2t * std::sin(t2) -
                        2.0 * m2 * l1 * lc2 * d2t * d1t * std::sin(t2) +
                        (m1 * lc1 + m2 * l1) * g *
                            std::cos(t1 - std::numbers::pi / 2.0) +
                        phi2;
    const double ddt2 =
        (torque + d2 / d1 * phi1 -
         m2 * l1 * lc2 * d1t * d1t * std::sin(t2) - phi2) /
        (m2 * lc2 * lc2 + I - d2 * d2 / d1);
    const double ddt1 = -(d2 * ddt2 + phi1) / d1;
    return {d1t, d2t, ddt1, ddt2};
}

}  // namespace

AcrobotState acrobot_rk4_step(const AcrobotState& s, double torque,
                              const AcrobotConfig& cfg) {
    AcrobotState y = s;
    const int n = std::max(1, cfg.substeps);
    const double h = cfg.dt / n;
    auto advance = [](const AcrobotState& base, const Deriv& d, double scale) {
        return AcrobotState{base.theta1 + scale * d.dtheta1,
                            base.theta2 + scale * d.dtheta2,
                            base.dtheta1 + scale * d.ddtheta1,
                            base.dtheta2 + scale * d.ddtheta2};
    };
    for (int i = 0; i < n; ++i) {
        Deriv k1 = derivatives(y, torque, cfg);
        Deriv k2 = derivatives(advance(y, k1, h / 2.0), torque, cfg);
        Deriv k3 = derivatives(advance(y, k2, h / 2.0), torque, cfg);
        Deriv k4 = derivatives(advance(y, k3, h), torque, cfg);
        y.theta1 += h / 6.0 *
                    (k1.dtheta1 + 2.0 * k2.dtheta1 + 2.0 * k3.dtheta1 +
                     k4.dtheta1);
        y.theta2 += h / 6.0 *
                    (k1.dtheta2 + 2.0 * k2.dtheta2 + 2.0 * k3.dtheta2 +
                     k4.dtheta2);
        y.dtheta1 += h / 6.0 *
                     (k1.ddtheta1 + 2.0 * k2.ddtheta1 + 2.0 * k3.ddtheta1 +
                      k4.ddtheta1);
        y.dtheta2 += h / 6.0 *
                     (k1.ddtheta2 + 2.0 * k2.ddtheta2 + 2.0 * k3.ddtheta2 +
                      k4.ddtheta2);
    }
    if (!std::isfinite(y.theta1) || !std::isfinite(y.theta2) ||
        !std::isfinite(y.dtheta1) || !std::isfinite(y.dtheta2))
        throw std::runtime_error("acrobot dynamics diverged");
    return y;
}

double acrobot_energy(const AcrobotState& s, const AcrobotConfig& c) {
    const double m1 = c.link_mass_1, m2 = c.link_mass_2;
    const double l1 = c.link_length_1;
    const double lc1 = c.link_com_1, lc2 = c.link_com_2;
    const double I = c.link_inertia;
    // Mass-matrix entries match the equations of motion.
    const double d1 = m1 * lc1 * lc1 +
                      m2 * (l1 * l1 + lc2 * lc2 +
                            2.0 * l1 * lc2 * std::cos(s.theta2)) +
                      2.0 * I;
    const double d2 =
        m2 * (lc2 * lc2 + l1 * lc2 * std::cos(s.theta2)) + I;
    const double d3 = m2 * lc2 * lc2 + I;
    const double kinetic = 0.5 * (d1 * s.dtheta1 * s.dtheta1 +
                                  2.0 * d2 * s.dtheta1 * s.dtheta2 +
                                  d3 * s.dtheta2 * s.dtheta2);
    const double y1 = -lc1 * std::cos(s.theta1);
    const double y2 =
        -l1 * std::cos(s.theta1) - lc2 * std::cos(s.theta1 + s.theta2);
    const double potential = c.gravity * (m1 * y1 + m2 * y2);
    return kinetic + potential;
}

double acrobot_tip_height(const AcrobotState& s) {
    return -std::cos(s.theta1) - std::cos(s.theta1 + s.theta2);
}

Eigen::VectorXd AcrobotRp::observe() const {
    Eigen::VectorXd obs(6);
    obs << std::cos(state_.theta1), std::sin(state_.theta1),
        std::cos(state_.theta2), std::sin(state_.theta2),
        state_.dtheta1 / cfg_.max_vel_1, state_.dtheta2 / cfg_.max_vel_2;
    return obs;
}

Eigen::VectorXd AcrobotRp::reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-cfg_.reset_range,
                                               cfg_.reset_range);
    state_.theta1 = uni(rng);
    state_.theta2 = uni(rng);
    state_.dtheta1 = uni(rng);
    state_.dtheta2 = uni(rng);
    steps_ = 0;
    done_ = false;
    return observe();
}

StepResult AcrobotRp::step(int action) {
    if (done_) throw std::logic_error("step after episode end; reset first");
    if (action < 0 || action >= num_actions())
        throw std::invalid_argument("invalid acrobot action");

    const double torque = (action - 1) * cfg_.torque_mag;
    state_ = acrobot_rk4_step(state_, torque, cfg_);
    state_.theta1 = wrap_pi(state_.theta1);
    state_.theta2 = wrap_pi(state_.theta2);
    state_.dtheta1 =
        std::clamp(state_.dtheta1, -cfg_.max_vel_1, cfg_.max_vel_1);
    state_.dtheta2 =
        std::clamp(state_.dtheta2, -cfg_.max_vel_2, cfg_.max_vel_2);
    ++steps_;

    StepResult result;
    result.observation = observe();
    if (acrobot_tip_height(state_) > cfg_.target_height)
        result.signal.reward = cfg_.reward_event;
    result.signal.punish =
        cfg_.punish_torque * std::abs(torque) + cfg_.punish_step;
    if (steps_ >= cfg_.max_steps) result.truncated = true;
    done_ = result.truncated;
    return result;
}

}  // namespace hdrl
