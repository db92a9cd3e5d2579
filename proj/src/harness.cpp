#include "hdrl/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace hdrl {

namespace {
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

std::unique_ptr<Env> make_env(const ExperimentConfig& cfg) {
    if (cfg.env_id == "cartpole-rp")
        return std::make_unique<CartPoleRp>(cfg.cartpole);
    if (cfg.env_id == "acrobot-rp")
        return std::make_unique<AcrobotRp>(cfg.acrobot);
    throw std::invalid_argument("unknown environment id: " + cfg.env_id);
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index) {
    return base_seed + static_cast<std::uint64_t>(trial_index);
}

TrialResult run_trial(const ExperimentConfig& cfg, int trial_index) {
    TrialResult result;
    result.trial = trial_index;
    try {
        auto env = make_env(cfg);
        AgentConfig agent_cfg = cfg.agent;
        const std::uint64_t seed = trial_seed(cfg.base_seed, trial_index);
        agent_cfg.seed = seed;
        Agent agent(agent_cfg, env->obs_dim(), env->num_actions());

        for (int ep = 0; ep < cfg.episodes; ++ep) {
            const std::uint64_t ep_seed =
                mix(seed * 0x10001ULL + static_cast<std::uint64_t>(ep));
            Eigen::VectorXd obs = env->reset(ep_seed);
            EpisodeRecord rec;
            rec.trial = trial_index;
            rec.episode = ep;
            double gamma_r_sum = 0.0, gamma_q_sum = 0.0;
            bool done = false;
            while (!done) {
                int action = agent.act(obs);
                StepResult sr = env->step(action);
                Transition tr{obs, action, sr.signal, sr.observation,
                              sr.terminal};
                StepDiagnostics d = agent.learn(tr);
                rec.reward_sum += sr.signal.reward;
                rec.punish_sum += sr.signal.punish;
                gamma_r_sum += d.gamma_r;
                gamma_q_sum += d.gamma_q;
                ++rec.steps;
                obs = sr.observation;
                done = sr.terminal || sr.truncated;
            }
            rec.combined_return = rec.reward_sum - rec.punish_sum;
            rec.mean_gamma_r = gamma_r_sum / rec.steps;
            rec.mean_gamma_q = gamma_q_sum / rec.steps;
            result.records.push_back(rec);
        }
    } catch (const std::exception& e) {
        result.failed = true;
        result.error = e.what();
        result.records.clear();
    }
    return result;
}

CaseResult run_case(const ExperimentConfig& cfg, const std::string& label) {
    CaseResult result;
    result.label = label;
    result.agent = cfg.agent;
    result.trials.resize(cfg.trials);

    const int jobs = std::max(1, cfg.jobs);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= cfg.trials) break;
            result.trials[i] = run_trial(cfg, i);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    result.curve = aggregate(result.trials);
    return result;
}

AggregateCurve aggregate(const std::vector<TrialResult>& trials) {
    AggregateCurve curve;
    std::size_t episodes = 0;
    for (const auto& t : trials)
        if (!t.failed) episodes = std::max(episodes, t.records.size());

    auto stats_at = [&](std::size_t ep, auto metric) {
        double sum = 0.0;
        int n = 0;
        for (const auto& t : trials) {
            if (t.failed || ep >= t.records.size()) continue;
            sum += metric(t.records[ep]);
            ++n;
        }
        const double mean = n > 0 ? sum / n : 0.0;
        double sq = 0.0;
        for (const auto& t : trials) {
            if (t.failed || ep >= t.records.size()) continue;
            const double d = metric(t.records[ep]) - mean;
            sq += d * d;
        }
        const double std_dev = n > 1 ? std::sqrt(sq / (n - 1)) : 0.0;
        return std::pair<double, double>{mean, std_dev};
    };

    for (std::size_t ep = 0; ep < episodes; ++ep) {
        auto push = [](std::vector<double>& m, std::vector<double>& s,
                       std::pair<double, double> v) {
            m.push_back(v.first);
            s.push_back(v.second);
        };
        push(curve.reward_mean, curve.reward_std,
             stats_at(ep, [](const EpisodeRecord& r) { return r.reward_sum; }));
        push(curve.punish_mean, curve.punish_std,
             stats_at(ep, [](const EpisodeRecord& r) { return r.punish_sum; }));
        push(curve.return_mean, curve.return_std,
             stats_at(ep,
                      [](const EpisodeRecord& r) { return r.combined_return; }));
        push(curve.gamma_r_mean, curve.gamma_r_std,
             stats_at(ep,
                      [](const EpisodeRecord& r) { return r.mean_gamma_r; }));
        push(curve.gamma_q_mean, curve.gamma_q_std,
             stats_at(ep,
                      [](const EpisodeRecord& r) { return r.mean_gamma_q; }));
        push(curve.steps_mean, curve.steps_std,
             stats_at(ep, [](const EpisodeRecord& r) {
                 return static_cast<double>(r.steps);
             }));
    }
    return curve;
}

std::pair<double, double> late_mean_discounts(
    const std::vector<TrialResult>& trials) {
    double sum_r = 0.0, sum_q = 0.0;
    std::uint64_t n = 0;
    for (const auto& t : trials) {
        if (t.failed || t.records.empty()) continue;
        const std::size_t start = t.records.size() * 3 / 4;
        for (std::size_t ep = start; ep < t.records.size(); ++ep) {
            sum_r += t.records[ep].mean_gamma_r;
            sum_q += t.records[ep].mean_gamma_q;
            ++n;
        }
    }
    if (n == 0) throw std::runtime_error("no successful trials to average");
    return {sum_r / n, sum_q / n};
}

ComparisonResult run_comparison(const ExperimentConfig& cfg) {
    ComparisonResult result;
    for (int i = 0; i < cfg.trials; ++i)
        result.trial_seeds.push_back(trial_seed(cfg.base_seed, i));

    ExperimentConfig hyp_cfg = cfg;
    hyp_cfg.agent.mode = AgentMode::hyperbolic;
    result.hyperbolic = run_case(hyp_cfg, "hyperbolic");

    bool any_ok = false;
    for (const auto& t : result.hyperbolic.trials)
        if (!t.failed) any_ok = true;
    if (!any_ok)
        throw std::runtime_error("all hyperbolic trials failed; aborting");

    auto [gr, gq] = late_mean_discounts(result.hyperbolic.trials);
    result.measured_gamma_r = gr;
    result.measured_gamma_q = gq;

    ExperimentConfig exp1_cfg = cfg;
    exp1_cfg.agent.mode = AgentMode::exponential;
    exp1_cfg.agent.gamma_reward = 0.99;
    exp1_cfg.agent.gamma_punish = 0.99;
    result.exponential1 = run_case(exp1_cfg, "exponential1");

    ExperimentConfig exp2_cfg = cfg;
    exp2_cfg.agent.mode = AgentMode::exponential;
    exp2_cfg.agent.gamma_reward = gr;
    exp2_cfg.agent.gamma_punish = gq;
    result.exponential2 = run_case(exp2_cfg, "exponential2");
    return result;
}

std::string format_float(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

void write_episodes_csv(const std::filesystem::path& path,
                        const std::vector<TrialResult>& trials) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << "trial,episode,reward_sum,punish_sum,return,mean_gamma_r,"
          "mean_gamma_q,steps\n";
    for (const auto& t : trials) {
        for (const auto& r : t.records) {
            os << r.trial << ',' << r.episode << ','
               << format_float(r.reward_sum) << ','
               << format_float(r.punish_sum) << ','
               << format_float(r.combined_return) << ','
               << format_float(r.mean_gamma_r) << ','
               << format_float(r.mean_gamma_q) << ',' << r.steps << '\n';
        }
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

void write_curve_csv(const std::filesystem::path& path,
                     const AggregateCurve& curve) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << "episode,reward_mean,reward_std,punish_mean,punish_std,"
          "return_mean,return_std,gamma_r_mean,gamma_r_std,"
          "gamma_q_mean,gamma_q_std,steps_mean,steps_std\n";
    for (std::size_t ep = 0; ep < curve.return_mean.size(); ++ep) {
        os << ep << ',' << format_float(curve.reward_mean[ep]) << ','
           << format_float(curve.reward_std[ep]) << ','
           << format_float(curve.punish_mean[ep]) << ','
           << format_float(curve.punish_std[ep]) << ','
           << format_float(curve.return_mean[ep]) << ','
           << format_float(curve.return_std[ep]) << ','
           << format_float(curve.gamma_r_mean[ep]) << ','
           << format_float(curve.gamma_r_std[ep]) << ','
           << format_float(curve.gamma_q_mean[ep]) << ','
           << format_float(curve.gamma_q_std[ep]) << ','
           << format_float(curve.steps_mean[ep]) << ','
           << format_float(curve.steps_std[ep]) << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

namespace {

nlohmann::ordered_json agent_json(const AgentConfig& a) {
    nlohmann::ordered_json j;
    j["mode"] = a.mode == AgentMode::hyperbolic ? "hyperbolic" : "exponential";
    j["kappa"] = a.hyper.kappa;
    j["exponent"] = a.hyper.exponent;
    j["beta"] = a.hyper.beta;
    j["gamma_reward"] = a.gamma_reward;
    j["gamma_punish"] = a.gamma_punish;
    j["critic_lr"] = a.critic_lr;
    j["actor_lr"] = a.actor_lr;
    j["ema_rate"] = a.ema_rate;
    j["compensate"] = a.compensate;
    j["hidden"] = a.hidden;
    j["init_scale"] = a.init_scale;
    j["init_output_bias"] = a.init_output_bias;
    return j;
}

nlohmann::ordered_json env_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["id"] = cfg.env_id;
    if (cfg.env_id == "cartpole-rp") {
        const auto& c = cfg.cartpole;
        j["gravity"] = c.gravity;
        j["cart_mass"] = c.cart_mass;
        j["pole_mass"] = c.pole_mass;
        j["half_length"] = c.half_length;
        j["force_mag"] = c.force_mag;
        j["dt"] = c.dt;
        j["position_limit"] = c.position_limit;
        j["angle_limit"] = c.angle_limit;
        j["reward_scale"] = c.reward_scale;
        j["punish_event"] = c.punish_event;
        j["reset_range"] = c.reset_range;
        j["max_steps"] = c.max_steps;
    } else {
        const auto& a = cfg.acrobot;
        j["gravity"] = a.gravity;
        j["link_mass_1"] = a.link_mass_1;
        j["link_mass_2"] = a.link_mass_2;
        j["link_length_1"] = a.link_length_1;
        j["link_com_1"] = a.link_com_1;
        j["link_com_2"] = a.link_com_2;
        j["link_inertia"] = a.link_inertia;
        j["torque_mag"] = a.torque_mag;
        j["dt"] = a.dt;
        j["substeps"] = a.substeps;
        j["target_height"] = a.target_height;
        j["reward_event"] = a.reward_event;
        j["punish_torque"] = a.punish_torque;
        j["punish_step"] = a.punish_step;
        j["reset_range"] = a.reset_range;
        j["max_steps"] = a.max_steps;
    }
    return j;
}

}  // namespace

void write_case_meta(const std::filesystem::path& path,
                     const ExperimentConfig& cfg, const CaseResult& result,
                     const std::vector<std::uint64_t>& seeds) {
    nlohmann::ordered_json j;
    j["label"] = result.label;
    j["environment"] = env_json(cfg);
    j["agent"] = agent_json(result.agent);
    j["trials"] = cfg.trials;
    j["episodes"] = cfg.episodes;
    j["base_seed"] = cfg.base_seed;
    j["trial_seeds"] = seeds;
    int failures = 0;
    nlohmann::ordered_json errs = nlohmann::ordered_json::array();
    for (const auto& t : result.trials) {
        if (t.failed) {
            ++failures;
            errs.push_back({{"trial", t.trial}, {"error", t.error}});
        }
    }
    j["failed_trials"] = failures;
    j["failures"] = errs;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << j.dump(2) << '\n';
}

void write_case_outputs(const std::filesystem::path& dir,
                        const ExperimentConfig& cfg, const CaseResult& result,
                        const std::vector<std::uint64_t>& seeds) {
    std::filesystem::create_directories(dir);
    write_episodes_csv(dir / "episodes.csv", result.trials);
    write_curve_csv(dir / "curve.csv", result.curve);
    write_case_meta(dir / "meta.json", cfg, result, seeds);
}

void write_comparison_meta(const std::filesystem::path& path,
                           const ExperimentConfig& cfg,
                           const ComparisonResult& result) {
    nlohmann::ordered_json j;
    j["environment"] = env_json(cfg);
    j["trials"] = cfg.trials;
    j["episodes"] = cfg.episodes;
    j["base_seed"] = cfg.base_seed;
    j["trial_seeds"] = result.trial_seeds;
    j["measured_gamma_r"] = result.measured_gamma_r;
    j["measured_gamma_q"] = result.measured_gamma_q;
    j["exponential2_gamma_r"] = result.exponential2.agent.gamma_reward;
    j["exponential2_gamma_q"] = result.exponential2.agent.gamma_punish;
    j["cases"] = {"hyperbolic", "exponential1", "exponential2"};
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << j.dump(2) << '\n';
}

void apply_config_entry(const std::string& key, const std::string& value,
                        ExperimentConfig& cfg) {
    auto as_d = [&] { return std::stod(value); };
    auto as_i = [&] { return std::stoi(value); };
    auto as_u = [&] { return std::stoull(value); };
    auto as_b = [&] { return value == "true" || value == "1"; };

    if (key == "env") cfg.env_id = value;
    else if (key == "trials") cfg.trials = as_i();
    else if (key == "episodes") cfg.episodes = as_i();
    else if (key == "seed") cfg.base_seed = as_u();
    else if (key == "out") cfg.out_dir = value;
    else if (key == "jobs") cfg.jobs = as_i();
    else if (key == "mode") {
        if (value == "hyperbolic") cfg.agent.mode = AgentMode::hyperbolic;
        else if (value == "exponential") cfg.agent.mode = AgentMode::exponential;
        else throw std::invalid_argument("unknown mode: " + value);
    }
    else if (key == "kappa") cfg.agent.hyper.kappa = as_d();
    else if (key == "exponent") cfg.agent.hyper.exponent = as_d();
    else if (key == "beta") cfg.agent.hyper.beta = as_d();
    else if (key == "gamma_r") cfg.agent.gamma_reward = as_d();
    else if (key == "gamma_q") cfg.agent.gamma_punish = as_d();
    else if (key == "critic_lr") cfg.agent.critic_lr = as_d();
    else if (key == "actor_lr") cfg.agent.actor_lr = as_d();
    else if (key == "ema_rate") cfg.agent.ema_rate = as_d();
    else if (key == "compensate") cfg.agent.compensate = as_b();
    else if (key == "hidden") cfg.agent.hidden = as_i();
    else if (key == "init_scale") cfg.agent.init_scale = as_d();
    else if (key == "init_output_bias") cfg.agent.init_output_bias = as_d();
    else if (key == "cartpole.gravity") cfg.cartpole.gravity = as_d();
    else if (key == "cartpole.cart_mass") cfg.cartpole.cart_mass = as_d();
    else if (key == "cartpole.pole_mass") cfg.cartpole.pole_mass = as_d();
    else if (key == "cartpole.half_length") cfg.cartpole.half_length = as_d();
    else if (key == "cartpole.force_mag") cfg.cartpole.force_mag = as_d();
    else if (key == "cartpole.dt") cfg.cartpole.dt = as_d();
    else if (key == "cartpole.position_limit")
        cfg.cartpole.position_limit = as_d();
    else if (key == "cartpole.angle_limit") cfg.cartpole.angle_limit = as_d();
    else if (key == "cartpole.reward_scale") cfg.cartpole.reward_scale = as_d();
    else if (key == "cartpole.punish_event") cfg.cartpole.punish_event = as_d();
    else if (key == "cartpole.reset_range") cfg.cartpole.reset_range = as_d();
    else if (key == "cartpole.max_steps") cfg.cartpole.max_steps = as_i();
    else if (key == "acrobot.gravity") cfg.acrobot.gravity = as_d();
    else if (key == "acrobot.link_mass_1") cfg.acrobot.link_mass_1 = as_d();
    else if (key == "acrobot.link_mass_2") cfg.acrobot.link_mass_2 = as_d();
    else if (key == "acrobot.link_length_1") cfg.acrobot.link_length_1 = as_d();
    else if (key == "acrobot.link_com_1") cfg.acrobot.link_com_1 = as_d();
    else if (key == "acrobot.link_com_2") cfg.acrobot.link_com_2 = as_d();
    else if (key == "acrobot.link_inertia") cfg.acrobot.link_inertia = as_d();
    else if (key == "acrobot.torque_mag") cfg.acrobot.torque_mag = as_d();
    else if (key == "acrobot.dt") cfg.acrobot.dt = as_d();
    else if (key == "acrobot.substeps") cfg.acrobot.substeps = as_i();
    else if (key == "acrobot.target_height") cfg.acrobot.target_height = as_d();
    else if (key == "acrobot.reward_event") cfg.acrobot.reward_event = as_d();
    else if (key == "acrobot.punish_torque") cfg.acrobot.punish_torque = as_d();
    else if (key == "acrobot.punish_step") cfg.acrobot.punish_step = as_d();
    else if (key == "acrobot.reset_range") cfg.acrobot.reset_range = as_d();
    else if (key == "acrobot.max_steps") cfg.acrobot.max_steps = as_i();
    else throw std::invalid_argument("unknown config key: " + key);
}

void apply_config_file(const std::filesystem::path& path,
                       ExperimentConfig& cfg) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" +
                                     std::to_string(lineno) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{}
                                          : s.substr(b, e - b + 1);
        };
        apply_config_entry(trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                           cfg);
    }
}

}  // namespace hdrl
