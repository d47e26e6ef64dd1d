#include "laserkit/adaptive.hpp"

#include <ostream>

#include "laserkit/difficulty.hpp"
#include "laserkit/kernels.hpp"

namespace laserkit {

void SearchConfig::validate() const {
    if (lower_bound <= 0) throw ConfigError("adapt.lower_bound must be > 0");
    if (lower_bound > context_window)
        throw ConfigError("adapt.lower_bound must not exceed adapt.context_window");
    if (interval <= 0) throw ConfigError("adapt.interval must be > 0");
    if (period < 1) throw ConfigError("adapt.period must be >= 1");
}

std::vector<TokenCount> SearchConfig::grid() const {
    std::vector<TokenCount> g;
    for (TokenCount l = lower_bound; l < context_window; l += interval) g.push_back(l);
    g.push_back(context_window);
    return g;
}

AdaptiveState AdaptiveState::initial(const SearchConfig& cfg) {
    AdaptiveState s;
    s.targets.fill(cfg.context_window);
    return s;
}

namespace {

// Responses of the samples that classify to one level, pooled, with per-question extents.
struct LevelPool {
    std::vector<TokenCount> pooled;
    std::vector<std::size_t> extents;

    bool empty() const noexcept { return extents.empty(); }
};

LevelPool collect(std::span<const MonitoringSample> samples, DifficultyLevel level) {
    LevelPool pool;
    for (const auto& s : samples) {
        if (s.responses.empty() || classify(s) != level) continue;
        for (const auto& r : s.responses) pool.pooled.push_back(r.length);
        pool.extents.push_back(s.responses.size());
    }
    return pool;
}

double pool_coverage(const LevelPool& pool, TokenCount l, CoverageMode mode) {
    if (pool.empty()) return 0.0;
    if (mode == CoverageMode::Pooled) {
        const std::size_t fit = kernels::count_at_most(pool.pooled, l);
        return static_cast<double>(fit) / static_cast<double>(pool.pooled.size());
    }
    const std::span<const TokenCount> all(pool.pooled);
    double sum = 0.0;
    std::size_t offset = 0;
    for (std::size_t n : pool.extents) {
        sum += static_cast<double>(kernels::count_at_most(all.subspan(offset, n), l)) /
               static_cast<double>(n);
        offset += n;
    }
    return sum / static_cast<double>(pool.extents.size());
}

bool qualifies(const LevelPool& pool, TokenCount l, std::size_t c_d, CoverageMode mode) {
    if (pool.empty()) return false;
    if (mode == CoverageMode::Pooled) {
        // P * |C_d| >= 1 evaluated exactly as fit * |C_d| >= total.
        const std::size_t fit = kernels::count_at_most(pool.pooled, l);
        return fit * c_d >= pool.pooled.size();
    }
    return pool_coverage(pool, l, mode) * static_cast<double>(c_d) >= 1.0 - 1e-12;
}

}  // namespace

double coverage_ratio(std::span<const MonitoringSample> samples, DifficultyLevel level,
                      TokenCount l, CoverageMode mode) {
    return pool_coverage(collect(samples, level), l, mode);
}

double expected_correct(double coverage, DifficultyLevel level, std::size_t k) {
    return coverage * static_cast<double>(min_correct(level, k));
}

TokenCount search_target_length(std::span<const MonitoringSample> samples, DifficultyLevel level,
                                const SearchConfig& cfg, std::size_t k) {
    cfg.validate();
    const LevelPool pool = collect(samples, level);
    const std::size_t c_d = min_correct(level, k);
    for (TokenCount l : cfg.grid())
        if (qualifies(pool, l, c_d, cfg.coverage)) return l;
    return cfg.context_window;
}

TargetArray search_all_targets(std::span<const MonitoringSample> samples, const SearchConfig& cfg,
                               std::size_t k) {
    TargetArray t{};
    for (DifficultyLevel level : kAllLevels)
        t[static_cast<int>(level)] = search_target_length(samples, level, cfg, k);
    return t;
}

AdaptiveState maybe_update(const AdaptiveState& state, std::int64_t step,
                           std::span<const MonitoringSample> samples, const SearchConfig& cfg,
                           std::size_t k) {
    cfg.validate();
    if (step < state.step_counter)
        throw ConfigError("maybe_update: step " + std::to_string(step) +
                          " precedes the current step counter");
    AdaptiveState next = state;
    next.step_counter = step;
    if (step % cfg.period != 0) return next;
    next.targets = search_all_targets(samples, cfg, k);
    next.history.push_back({step, next.targets});
    return next;
}

TokenCount resolve(const AdaptiveState& state, DifficultyLevel level) noexcept {
    return state.target(level);
}

void write_history_csv(std::ostream& os, std::span<const TargetSnapshot> history) {
    os << "step,la_easy,la_medium,la_hard\n";
    for (const auto& h : history)
        os << h.step << ',' << h.targets[static_cast<int>(DifficultyLevel::Easy)] << ','
           << h.targets[static_cast<int>(DifficultyLevel::Medium)] << ','
           << h.targets[static_cast<int>(DifficultyLevel::Hard)] << '\n';
}

void write_history_jsonl(std::ostream& os, std::span<const TargetSnapshot> history) {
    for (const auto& h : history)
        os << "{\"step\":" << h.step
           << ",\"la_easy\":" << h.targets[static_cast<int>(DifficultyLevel::Easy)]
           << ",\"la_medium\":" << h.targets[static_cast<int>(DifficultyLevel::Medium)]
           << ",\"la_hard\":" << h.targets[static_cast<int>(DifficultyLevel::Hard)] << "}\n";
}

}  // namespace laserkit
