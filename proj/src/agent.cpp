#include "hdrl/agent.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hdrl {

namespace {
std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

Agent::Agent(AgentConfig cfg, int obs_dim, int num_actions)
    : cfg_(cfg),
      critic_r_(obs_dim, cfg.hidden, mix(cfg.seed ^ 0x1ULL), cfg.init_scale,
                cfg.init_output_bias),
      critic_q_(obs_dim, cfg.hidden, mix(cfg.seed ^ 0x2ULL), cfg.init_scale,
                cfg.init_output_bias),
      policy_(obs_dim, num_actions, cfg.hidden, mix(cfg.seed ^ 0x3ULL),
              cfg.init_scale),
      rng_(mix(cfg.seed ^ 0x4ULL)) {
    if (!(cfg.hyper.kappa >= 0.0) || !(cfg.hyper.exponent > 0.0) ||
        !(cfg.hyper.beta >= 0.0))
        throw std::invalid_argument("invalid hyperbolic hyperparameters");
    if (!(cfg.gamma_reward >= 0.0 && cfg.gamma_reward <= 1.0) ||
        !(cfg.gamma_punish >= 0.0 && cfg.gamma_punish <= 1.0))
        throw std::invalid_argument("exponential gammas must be in [0,1]");
    if (!(cfg.ema_rate > 0.0 && cfg.ema_rate <= 1.0))
        throw std::invalid_argument("ema_rate must be in (0,1]");
    stats_r_.ema_rate = cfg.ema_rate;
    stats_q_.ema_rate = cfg.ema_rate;
}

int Agent::act(const Eigen::VectorXd& state_features) {
    Eigen::VectorXd probs = policy_.action_probs(state_features);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double u = uni(rng_);
    double cum = 0.0;
    for (int a = 0; a < probs.size(); ++a) {
        cum += probs(a);
        if (u < cum) return a;
    }
    return static_cast<int>(probs.size()) - 1;
}

StepDiagnostics Agent::learn(const Transition& tr) {
    if (tr.state.size() != tr.next_state.size())
        throw std::invalid_argument("transition feature lengths differ");
    if (!(tr.signal.reward >= 0.0) || !(tr.signal.punish >= 0.0))
        throw std::invalid_argument("channel signals must be nonnegative");

    StepDiagnostics diag;
    const bool hyper = cfg_.mode == AgentMode::hyperbolic;

    auto vr = critic_r_.forward(tr.state);
    auto vq = critic_q_.forward(tr.state);
    auto vr_next = critic_r_.forward(tr.next_state);
    auto vq_next = critic_q_.forward(tr.next_state);
    diag.v_r = vr.value;
    diag.v_q = vq.value;

    double scaled_r = tr.signal.reward;
    double scaled_q = tr.signal.punish;
    if (hyper) {
        diag.gamma_r = effective_discount(vr.value, stats_r_, cfg_.hyper);
        diag.gamma_q = effective_discount(vq.value, stats_q_, cfg_.hyper);
        if (cfg_.compensate) {
            scaled_r = compensate_scale(scaled_r, stats_r_.avg_discount);
            scaled_q = compensate_scale(scaled_q, stats_q_.avg_discount);
        }
    } else {
        diag.gamma_r = cfg_.gamma_reward;
        diag.gamma_q = cfg_.gamma_punish;
    }

    diag.delta_r = hyper_td_error(scaled_r, diag.gamma_r, vr.value,
                                  vr_next.value, tr.terminal);
    diag.delta_q = hyper_td_error(scaled_q, diag.gamma_q, vq.value,
                                  vq_next.value, tr.terminal);

    if (!std::isfinite(diag.delta_r) || !std::isfinite(diag.delta_q)) {
        diag.rejected = true;  // agent state untouched
        return diag;
    }

    critic_r_.update(tr.state, diag.delta_r, cfg_.critic_lr);
    critic_q_.update(tr.state, diag.delta_q, cfg_.critic_lr);
    if (hyper) {
        stats_r_ = update_stats(stats_r_, tr.signal.reward);
        stats_q_ = update_stats(stats_q_, tr.signal.punish);
        stats_r_ = update_avg_discount(stats_r_, diag.gamma_r);
        stats_q_ = update_avg_discount(stats_q_, diag.gamma_q);
    }
    policy_.update(tr.state, tr.action, diag.delta_r - diag.delta_q,
                   cfg_.actor_lr);
    ++steps_;
    return diag;
}

double Agent::combined_value(const Eigen::VectorXd& state_features) const {
    return critic_r_.forward(state_features).value -
           critic_q_.forward(state_features).value;
}

std::pair<double, double> Agent::snapshot_discount_averages() const {
    if (steps_ == 0)
        throw std::logic_error("no steps absorbed yet");
    return {stats_r_.avg_discount, stats_q_.avg_discount};
}

void Agent::save(std::ostream& os) const {
    os << "hdrl-agent 1\n";
    critic_r_.net().save(os, "critic_reward");
    critic_q_.net().save(os, "critic_punish");
    policy_.net().save(os, "policy");
    os.precision(17);
    auto dump_stats = [&](const RunningStats& s) {
        os << s.mean << ' ' << s.var << ' ' << s.std << ' ' << s.avg_discount
           << ' ' << s.ema_rate << ' ' << s.count << '\n';
    };
    dump_stats(stats_r_);
    dump_stats(stats_q_);
    os << steps_ << '\n';
    os << rng_ << '\n';
}

void Agent::load(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "hdrl-agent" || version != 1)
        throw std::runtime_error("not an agent checkpoint");
    auto load_head = [&](MlpHead& dst, const char* expect) {
        std::string name;
        MlpHead head = MlpHead::load(is, &name);
        if (name != expect)
            throw std::runtime_error("unexpected head in checkpoint");
        dst = head;
    };
    load_head(critic_r_.net(), "critic_reward");
    load_head(critic_q_.net(), "critic_punish");
    load_head(policy_.net(), "policy");
    auto read_stats = [&](RunningStats& s) {
        is >> s.mean >> s.var >> s.std >> s.avg_discount >> s.ema_rate >>
            s.count;
    };
    read_stats(stats_r_);
    read_stats(stats_q_);
    is >> steps_;
    is >> rng_;
    if (!is) throw std::runtime_error("truncated agent checkpoint");
}

}  // namespace hdrl
