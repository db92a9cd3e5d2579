#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "hdrl/agent.hpp"
#include "hdrl/envs/acrobot.hpp"
#include "hdrl/envs/cartpole.hpp"

namespace hdrl {

struct ExperimentConfig {
    std::string env_id = "cartpole-rp";  // or "acrobot-rp"
    AgentConfig agent{};
    int trials = 50;
    int episodes = 300;
    std::uint64_t base_seed = 0;
    std::string out_dir = "out";
    int jobs = 1;
    CartPoleConfig cartpole{};
    AcrobotConfig acrobot{};
};

struct EpisodeRecord {
    int trial = 0;
    int episode = 0;
    double reward_sum = 0.0;
    double punish_sum = 0.0;
    double combined_return = 0.0;  // reward_sum - punish_sum
    double mean_gamma_r = 1.0;
    double mean_gamma_q = 1.0;
    int steps = 0;
};

struct TrialResult {
    int trial = 0;
    bool failed = false;
    std::string error;
    std::vector<EpisodeRecord> records;
};

struct AggregateCurve {
    // One entry per episode index, mean/std across successful trials.
    std::vector<double> reward_mean, reward_std;
    std::vector<double> punish_mean, punish_std;
    std::vector<double> return_mean, return_std;
    std::vector<double> gamma_r_mean, gamma_r_std;
    std::vector<double> gamma_q_mean, gamma_q_std;
    std::vector<double> steps_mean, steps_std;
};

struct CaseResult {
    std::string label;
    AgentConfig agent;
    std::vector<TrialResult> trials;
    AggregateCurve curve;
};

struct ComparisonResult {
    CaseResult hyperbolic;
    CaseResult exponential1;
    CaseResult exponential2;
    double measured_gamma_r = 0.0;  // feeds exponential2
    double measured_gamma_q = 0.0;
    std::vector<std::uint64_t> trial_seeds;
};

std::unique_ptr<Env> make_env(const ExperimentConfig& cfg);

std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index);

TrialResult run_trial(const ExperimentConfig& cfg, int trial_index);

// Runs all trials (parallel when cfg.jobs > 1) and aggregates.
CaseResult run_case(const ExperimentConfig& cfg, const std::string& label);

// Three-case protocol: hyperbolic, exponential gamma=0.99, exponential
// with the hyperbolic phase's measured average discounts. All cases
// share the same trial seeds.
ComparisonResult run_comparison(const ExperimentConfig& cfg);

AggregateCurve aggregate(const std::vector<TrialResult>& trials);

// Mean of each channel's per-episode mean discount over the final
// quarter of episodes, across all successful trials.
std::pair<double, double> late_mean_discounts(
    const std::vector<TrialResult>& trials);

void write_episodes_csv(const std::filesystem::path& path,
                        const std::vector<TrialResult>& trials);
void write_curve_csv(const std::filesystem::path& path,
                     const AggregateCurve& curve);
void write_case_meta(const std::filesystem::path& path,
                     const ExperimentConfig& cfg, const CaseResult& result,
                     const std::vector<std::uint64_t>& seeds);
void write_comparison_meta(const std::filesystem::path& path,
                           const ExperimentConfig& cfg,
                           const ComparisonResult& result);

// Writes episodes.csv, curve.csv and meta.json under dir.
void write_case_outputs(const std::filesystem::path& dir,
                        const ExperimentConfig& cfg, const CaseResult& result,
                        const std::vector<std::uint64_t>& seeds);

// Flat key=value config file; '#' starts a comment.
void apply_config_file(const std::filesystem::path& path,
                       ExperimentConfig& cfg);
void apply_config_entry(const std::string& key, const std::string& value,
                        ExperimentConfig& cfg);

std::string format_float(double x);  // 9 significant digits, deterministic

}  // namespace hdrl
