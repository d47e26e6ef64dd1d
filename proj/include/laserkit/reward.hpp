#pragma once

#include <optional>
#include <span>
#include <vector>

#include "laserkit/types.hpp"

namespace laserkit {

/// Rule-based outcome reward: +1 correct, -0.5 wrong answer, -1 unparseable output.
double correctness_reward(bool correct, bool format_valid) noexcept;
double correctness_reward(const ResponseRecord& r) noexcept;

struct Outcome {
    bool correct = false;
    bool format_valid = true;
};

inline Outcome outcome_of(const ResponseRecord& r) noexcept { return {r.correct, r.format_valid}; }

// Real-valued forms. Lengths and targets are doubles so the same code draws
// the continuous reward curves; the record forms below forward to these.

RewardBreakdown truncation_gate_at(double length, Outcome o, double limit, double rho) noexcept;
RewardBreakdown laser_at(double length, Outcome o, double target, double alpha) noexcept;
RewardBreakdown laser_de_at(double length, Outcome o, double target, double alpha,
                            bool exclude_invalid = false) noexcept;
RewardBreakdown l1_exact_at(double length, Outcome o, double target, double alpha) noexcept;
RewardBreakdown l1_max_at(double length, Outcome o, double target, double alpha, double delta,
                          L1MaxSign sign) noexcept;

/// Length statistics of the correct responses of a group.
struct CorrectLengthStats {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;  // population
};

CorrectLengthStats correct_length_stats(const RolloutGroup& g);

/// z = (L - mean) / stddev, or 0 when stddev is 0.
RewardBreakdown group_efficient_at(double length, Outcome o, double mean, double stddev,
                                   double alpha) noexcept;
/// S := 0 when max == min.
RewardBreakdown kimi_at(double length, Outcome o, double min_length, double max_length) noexcept;

double logistic(double x) noexcept;

// Record forms.

RewardBreakdown truncation_gate(const ResponseRecord& r, TokenCount limit, double rho = 0.0);
RewardBreakdown laser(const ResponseRecord& r, TokenCount target, double alpha);
RewardBreakdown laser_d(const ResponseRecord& r, TokenCount adaptive_target, double alpha);
RewardBreakdown laser_de(const ResponseRecord& r, TokenCount adaptive_target, double alpha,
                         bool exclude_invalid = false);
RewardBreakdown l1_exact(const ResponseRecord& r, TokenCount target, double alpha);
RewardBreakdown l1_max(const ResponseRecord& r, TokenCount target, double alpha, double delta,
                       L1MaxSign sign = L1MaxSign::AsPrinted);

std::vector<RewardBreakdown> group_efficient(const RolloutGroup& g, double alpha);
std::vector<RewardBreakdown> kimi(const RolloutGroup& g);

/// Dispatches on config.variant. `resolved_target` is the L_A for the group and
/// is required by ThinkPrune, LaserD and LaserDE (ConfigError otherwise).
std::vector<RewardBreakdown> shape(const ShaperConfig& config, const RolloutGroup& g,
                                   std::optional<TokenCount> resolved_target = std::nullopt);

}  // namespace laserkit
