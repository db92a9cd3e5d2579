#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace hdrl {

struct ChannelSignal {
    double reward = 0.0;  // nonnegative
    double punish = 0.0;  // nonnegative
};

struct StepResult {
    Eigen::VectorXd observation;
    ChannelSignal signal;
    bool terminal = false;
    bool truncated = false;
};

class Env {
public:
    virtual ~Env() = default;
    virtual Eigen::VectorXd reset(std::uint64_t seed) = 0;
    virtual StepResult step(int action) = 0;
    virtual int obs_dim() const = 0;
    virtual int num_actions() const = 0;
    virtual int horizon() const = 0;
};

}  // namespace hdrl
