#pragma once

// Synthetic group-relative policy-gradient loop.
//
// Each question class c has a log-normal length policy LogNormal(mu_c, sigma)
// and a correctness curve p(L) = p_max * (1 - exp(-L / tau)). A sampled length
// above the context window is cut at the window and carries no parseable answer.
// Rewards come from the configured shaper, advantages are normalized within
// each rollout group, and mu_c follows the score-function gradient.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "laserkit/adaptive.hpp"
#include "laserkit/rollout_io.hpp"
#include "laserkit/types.hpp"

namespace laserkit {

struct QuestionClass {
    std::string name;
    double p_max = 0.5;
    double tau = 1000.0;
    std::size_t count = 100;         // questions of this class in the bank
    double initial_length = 8000.0;  // median of the initial length policy
};

struct SyntheticQuestion {
    std::string id;
    std::size_t class_index = 0;
    double p_max = 0.5;
    double tau = 1000.0;
};

struct PolicyParams {
    std::vector<double> mu;  // log-length location per class
    double sigma = 0.5;
    double learning_rate = 0.05;
};

struct SimConfig {
    std::vector<QuestionClass> classes;
    std::size_t k = 8;
    std::size_t batch = 128;
    std::int64_t steps = 200;
    ShaperConfig shaper;
    SearchConfig adapt;
    std::size_t monitoring_size = 500;
    std::uint64_t seed = 0;
    double sigma = 0.5;
    double learning_rate = 0.05;
    double format_valid_prob = 0.99;
    /// ThinkPrune target per stage; the run is split evenly across stages.
    std::vector<TokenCount> think_prune_stages;

    void validate() const;
};

struct StepReport {
    std::int64_t step = 0;
    double mean_length = 0.0;
    double accuracy = 0.0;
    double mean_total_reward = 0.0;
    TargetArray targets{};
    double truncation_ratio = 0.0;

    bool operator==(const StepReport&) const = default;
};

/// Engine plus the two distributions the simulator draws from; every response
/// consumes one normal and two uniforms in a fixed order.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

struct SampledGroup {
    RolloutGroup group;
    std::size_t class_index = 0;
    std::vector<double> log_lengths;  // latent draws, before rounding and clipping
    std::vector<TokenCount> raw_lengths;
};

double correctness_probability(const SyntheticQuestion& q, TokenCount length) noexcept;

/// k responses for q under the current policy.
SampledGroup rollout(const SyntheticQuestion& q, const PolicyParams& params, std::size_t k,
                     SimRng& rng, TokenCount context_window = 16384,
                     double format_valid_prob = 0.99);

/// (r - mean) / (population std + 1e-8).
std::vector<double> group_advantage(std::span<const double> rewards);

struct ScoredResponse {
    std::size_t class_index = 0;
    double log_length = 0.0;
    double advantage = 0.0;
};

/// mu_c += lr * mean over class-c responses of A * (ln L - mu_c) / sigma^2.
PolicyParams policy_update(const PolicyParams& params, std::span<const ScoredResponse> scored);

/// Analytic per-class gradient of mean(A * log density(ln L; mu_c, sigma)).
std::vector<double> surrogate_gradient(const PolicyParams& params,
                                       std::span<const ScoredResponse> scored);
double surrogate_objective(const PolicyParams& params, std::span<const ScoredResponse> scored,
                           std::size_t class_index);

/// Max relative error between surrogate_gradient and a central difference in mu.
double finite_difference_check(const PolicyParams& params, std::span<const ScoredResponse> scored,
                               double epsilon);

std::vector<SyntheticQuestion> build_bank(const SimConfig& cfg);
PolicyParams initial_policy(const SimConfig& cfg);

struct SimResult {
    std::vector<StepReport> reports;
    AdaptiveState adaptive;
    PolicyParams policy;
    std::vector<RolloutLogRecord> rollouts;  // only with record_rollouts
    std::vector<double> rollout_totals;
};

struct RunOptions {
    bool record_rollouts = false;
};

SimResult run(const SimConfig& cfg, const RunOptions& options = {});

/// q-quantile of step-0 sampled lengths (the same draws run() uses at step 0).
TokenCount initial_length_quantile(const SimConfig& cfg, double q);

void write_trajectory_csv(std::ostream& os, std::span<const StepReport> reports);

}  // namespace laserkit
