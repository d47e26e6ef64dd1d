#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "laserkit/types.hpp"

namespace laserkit {

/// K responses sampled for one monitoring question.
using MonitoringSample = RolloutGroup;

enum class CoverageMode {
    Pooled,       // fraction of all responses of the level that fit
    PerQuestion,  // mean over questions of the per-question fraction
};

struct SearchConfig {
    TokenCount lower_bound = 1024;
    TokenCount context_window = 16384;
    TokenCount interval = 512;
    std::int64_t period = 20;
    CoverageMode coverage = CoverageMode::Pooled;

    void validate() const;

    /// lower_bound, lower_bound + interval, ... below context_window, then context_window.
    std::vector<TokenCount> grid() const;
};

using TargetArray = std::array<TokenCount, 3>;  // indexed by static_cast<int>(DifficultyLevel)

struct TargetSnapshot {
    std::int64_t step = 0;
    TargetArray targets{};

    bool operator==(const TargetSnapshot&) const = default;
};

/// Per-difficulty target lengths. Updated by value: maybe_update returns a new state.
struct AdaptiveState {
    TargetArray targets{};
    std::int64_t step_counter = 0;
    std::vector<TargetSnapshot> history;

    /// Every level starts at the context window (unconstrained).
    static AdaptiveState initial(const SearchConfig& cfg);

    TokenCount target(DifficultyLevel level) const noexcept {
        return targets[static_cast<int>(level)];
    }
};

/// P_{l,d}: share of monitoring responses, among samples whose group classifies
/// to `level`, with length <= l. 0 when no sample has that level.
double coverage_ratio(std::span<const MonitoringSample> samples, DifficultyLevel level,
                      TokenCount l, CoverageMode mode = CoverageMode::Pooled);

/// ECR_d = P * |C_d|.
double expected_correct(double coverage, DifficultyLevel level, std::size_t k);

/// Smallest grid length whose expected correct responses reach 1; the context
/// window when none does.
TokenCount search_target_length(std::span<const MonitoringSample> samples, DifficultyLevel level,
                                const SearchConfig& cfg, std::size_t k);

TargetArray search_all_targets(std::span<const MonitoringSample> samples, const SearchConfig& cfg,
                               std::size_t k);

/// Recomputes all targets when `step` is a multiple of cfg.period; otherwise
/// returns the state unchanged (apart from the step counter).
AdaptiveState maybe_update(const AdaptiveState& state, std::int64_t step,
                           std::span<const MonitoringSample> samples, const SearchConfig& cfg,
                           std::size_t k);

TokenCount resolve(const AdaptiveState& state, DifficultyLevel level) noexcept;

/// "step,la_easy,la_medium,la_hard" rows.
void write_history_csv(std::ostream& os, std::span<const TargetSnapshot> history);
void write_history_jsonl(std::ostream& os, std::span<const TargetSnapshot> history);

}  // namespace laserkit
