#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

#include "hdrl/harness.hpp"

namespace {

struct Flags {
    std::string env, mode, config;
    double kappa = 0, exponent = 0, beta = 0, gamma_r = 0, gamma_q = 0;
    int trials = 0, episodes = 0, jobs = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--env", f.env, "environment: cartpole-rp | acrobot-rp");
    cmd->add_option("--kappa", f.kappa, "hyperbolic curvature");
    cmd->add_option("--exponent", f.exponent, "denominator exponent");
    cmd->add_option("--beta", f.beta, "std weight in the bias term");
    cmd->add_option("--gamma-r", f.gamma_r, "fixed reward discount");
    cmd->add_option("--gamma-q", f.gamma_q, "fixed punishment discount");
    cmd->add_option("--trials", f.trials, "number of seeded trials");
    cmd->add_option("--episodes", f.episodes, "episodes per trial");
    cmd->add_option("--seed", f.seed, "base seed");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--config", f.config, "flat key=value config file");
    cmd->add_option("--jobs", f.jobs, "parallel trial workers");
}

hdrl::ExperimentConfig resolve(const CLI::App* cmd, const Flags& f) {
    hdrl::ExperimentConfig cfg;
    if (!f.config.empty()) hdrl::apply_config_file(f.config, cfg);
    // flags override the file
    if (cmd->count("--env")) cfg.env_id = f.env;
    if (cmd->count("--mode"))
        hdrl::apply_config_entry("mode", f.mode, cfg);
    if (cmd->count("--kappa")) cfg.agent.hyper.kappa = f.kappa;
    if (cmd->count("--exponent")) cfg.agent.hyper.exponent = f.exponent;
    if (cmd->count("--beta")) cfg.agent.hyper.beta = f.beta;
    if (cmd->count("--gamma-r")) cfg.agent.gamma_reward = f.gamma_r;
    if (cmd->count("--gamma-q")) cfg.agent.gamma_punish = f.gamma_q;
    if (cmd->count("--trials")) cfg.trials = f.trials;
    if (cmd->count("--episodes")) cfg.episodes = f.episodes;
    if (cmd->count("--seed")) cfg.base_seed = f.seed;
    if (cmd->count("--out")) cfg.out_dir = f.out;
    if (cmd->count("--jobs")) cfg.jobs = f.jobs;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolically-discounted reward-punishment RL runner"};
    app.require_subcommand(1);

    Flags run_flags, cmp_flags;
    auto* run_cmd = app.add_subcommand("run", "train a single case");
    run_cmd->add_option("--mode", run_flags.mode,
                        "agent mode: hyperbolic | exponential");
    add_common(run_cmd, run_flags);

    auto* cmp_cmd =
        app.add_subcommand("compare", "three-case comparison protocol");
    cmp_cmd->add_option("--mode", cmp_flags.mode)->group("");  // ignored
    add_common(cmp_cmd, cmp_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            hdrl::ExperimentConfig cfg = resolve(run_cmd, run_flags);
            auto result = hdrl::run_case(
                cfg, cfg.agent.mode == hdrl::AgentMode::hyperbolic
                         ? "hyperbolic"
                         : "exponential");
            std::vector<std::uint64_t> seeds;
            for (int i = 0; i < cfg.trials; ++i)
                seeds.push_back(hdrl::trial_seed(cfg.base_seed, i));
            hdrl::write_case_outputs(cfg.out_dir, cfg, result, seeds);
            std::printf("wrote %s\n", cfg.out_dir.c_str());
        } else {
            hdrl::ExperimentConfig cfg = resolve(cmp_cmd, cmp_flags);
            auto result = hdrl::run_comparison(cfg);
            std::filesystem::path root = cfg.out_dir;
            hdrl::ExperimentConfig c1 = cfg;
            c1.agent = result.hyperbolic.agent;
            hdrl::write_case_outputs(root / "hyperbolic", c1,
                                     result.hyperbolic, result.trial_seeds);
            hdrl::ExperimentConfig c2 = cfg;
            c2.agent = result.exponential1.agent;
            hdrl::write_case_outputs(root / "exponential1", c2,
                                     result.exponential1, result.trial_seeds);
            hdrl::ExperimentConfig c3 = cfg;
            c3.agent = result.exponential2.agent;
            hdrl::write_case_outputs(root / "exponential2", c3,
                                     result.exponential2, result.trial_seeds);
            std::filesystem::create_directories(root);
            hdrl::write_comparison_meta(root / "meta.json", cfg, result);
            std::printf("wrote %s (measured gamma_r=%.4f gamma_q=%.4f)\n",
                        cfg.out_dir.c_str(), result.measured_gamma_r,
                        result.measured_gamma_q);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
