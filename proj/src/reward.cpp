#include "laserkit/reward.hpp"

#include <algorithm>
#include <cmath>

namespace laserkit {

namespace {

RewardBreakdown compose(double c, double lambda, double s) noexcept {
    return {c, lambda, s, c + lambda * s};
}

double indicator(bool b) noexcept { return b ? 1.0 : 0.0; }

void require_positive(TokenCount v, const char* what) {
    if (v <= 0) throw ConfigError(std::string(what) + " must be > 0");
}

}  // namespace

double correctness_reward(bool correct, bool format_valid) noexcept {
    if (correct) return 1.0;
    return format_valid ? -0.5 : -1.0;
}

double correctness_reward(const ResponseRecord& r) noexcept {
    return correctness_reward(r.correct, r.format_valid);
}

double logistic(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

RewardBreakdown truncation_gate_at(double length, Outcome o, double limit, double rho) noexcept {
    const double s = length <= limit ? correctness_reward(o.correct, o.format_valid) : rho;
    return compose(0.0, 1.0, s);
}

RewardBreakdown laser_at(double length, Outcome o, double target, double alpha) noexcept {
    return compose(correctness_reward(o.correct, o.format_valid), indicator(o.correct),
                   alpha * indicator(length <= target));
}

RewardBreakdown laser_de_at(double length, Outcome o, double target, double alpha,
                            bool exclude_invalid) noexcept {
    const bool explore = !o.correct && length > target && (o.format_valid || !exclude_invalid);
    const double s = alpha * indicator(o.correct && length <= target) + alpha * indicator(explore);
    return compose(correctness_reward(o.correct, o.format_valid), 1.0, s);
}

RewardBreakdown l1_exact_at(double length, Outcome o, double target, double alpha) noexcept {
    return compose(correctness_reward(o.correct, o.format_valid), 1.0,
                   -alpha * std::abs(length - target));
}

RewardBreakdown l1_max_at(double length, Outcome o, double target, double alpha, double delta,
                          L1MaxSign sign) noexcept {
    const double slope = sign == L1MaxSign::AsPrinted ? length - target : target - length;
    return compose(0.0, indicator(o.correct), std::clamp(alpha * slope + delta, 0.0, 1.0));
}

RewardBreakdown group_efficient_at(double length, Outcome o, double mean, double stddev,
                                   double alpha) noexcept {
    const double z = stddev > 0.0 ? (length - mean) / stddev : 0.0;
    return compose(correctness_reward(o.correct, o.format_valid), indicator(o.correct),
                   -alpha * logistic(z));
}

RewardBreakdown kimi_at(double length, Outcome o, double min_length, double max_length) noexcept {
    double s = 0.0;
    if (max_length > min_length) {
        s = 0.5 - (length - min_length) / (max_length - min_length);
        if (!o.correct) s = std::min(0.0, s);
    }
    return compose(correctness_reward(o.correct, o.format_valid), 1.0, s);
}

CorrectLengthStats correct_length_stats(const RolloutGroup& g) {
    CorrectLengthStats st;
    double sum = 0.0;
    for (const auto& r : g.responses) {
        if (!r.correct) continue;
        ++st.count;
        sum += static_cast<double>(r.length);
    }
    if (st.count == 0) return st;
    st.mean = sum / static_cast<double>(st.count);
    double ss = 0.0;
    for (const auto& r : g.responses) {
        if (!r.correct) continue;
        const double d = static_cast<double>(r.length) - st.mean;
        ss += d * d;
    }
    st.stddev = st.count > 1 ? std::sqrt(ss / static_cast<double>(st.count)) : 0.0;
    return st;
}

RewardBreakdown truncation_gate(const ResponseRecord& r, TokenCount limit, double rho) {
    require_positive(limit, "truncation limit");
    return truncation_gate_at(static_cast<double>(r.length), outcome_of(r),
                              static_cast<double>(limit), rho);
}

RewardBreakdown laser(const ResponseRecord& r, TokenCount target, double alpha) {
    require_positive(target, "target length");
    return laser_at(static_cast<double>(r.length), outcome_of(r), static_cast<double>(target),
                    alpha);
}

RewardBreakdown laser_d(const ResponseRecord& r, TokenCount adaptive_target, double alpha) {
    require_positive(adaptive_target, "adaptive target length");
    return laser_at(static_cast<double>(r.length), outcome_of(r),
                    static_cast<double>(adaptive_target), alpha);
}

RewardBreakdown laser_de(const ResponseRecord& r, TokenCount adaptive_target, double alpha,
                         bool exclude_invalid) {
    require_positive(adaptive_target, "adaptive target length");
    return laser_de_at(static_cast<double>(r.length), outcome_of(r),
                       static_cast<double>(adaptive_target), alpha, exclude_invalid);
}

RewardBreakdown l1_exact(const ResponseRecord& r, TokenCount target, double alpha) {
    require_positive(target, "target length");
    return l1_exact_at(static_cast<double>(r.length), outcome_of(r), static_cast<double>(target),
                       alpha);
}

RewardBreakdown l1_max(const ResponseRecord& r, TokenCount target, double alpha, double delta,
                       L1MaxSign sign) {
    require_positive(target, "target length");
    return l1_max_at(static_cast<double>(r.length), outcome_of(r), static_cast<double>(target),
                     alpha, delta, sign);
}

std::vector<RewardBreakdown> group_efficient(const RolloutGroup& g, double alpha) {
    const CorrectLengthStats st = correct_length_stats(g);
    std::vector<RewardBreakdown> out;
    out.reserve(g.size());
    for (const auto& r : g.responses) {
        if (st.count == 0) {
            out.push_back(compose(correctness_reward(r), 0.0, 0.0));
            continue;
        }
        out.push_back(group_efficient_at(static_cast<double>(r.length), outcome_of(r), st.mean,
                                         st.stddev, alpha));
    }
    return out;
}

std::vector<RewardBreakdown> kimi(const RolloutGroup& g) {
    std::vector<RewardBreakdown> out;
    if (g.responses.empty()) return out;
    const auto [lo, hi] = std::minmax_element(
        g.responses.begin(), g.responses.end(),
        [](const ResponseRecord& a, const ResponseRecord& b) { return a.length < b.length; });
    const double min_len = static_cast<double>(lo->length);
    const double max_len = static_cast<double>(hi->length);
    out.reserve(g.size());
    for (const auto& r : g.responses)
        out.push_back(kimi_at(static_cast<double>(r.length), outcome_of(r), min_len, max_len));
    return out;
}

std::vector<RewardBreakdown> shape(const ShaperConfig& config, const RolloutGroup& g,
                                   std::optional<TokenCount> resolved_target) {
    if (needs_resolved_target(config.variant) && !resolved_target)
        throw ConfigError(std::string("variant ") + to_string(config.variant) +
                          " requires a resolved adaptive target length");

    switch (config.variant) {
        case Variant::GroupEfficient: return group_efficient(g, config.alpha);
        case Variant::Kimi: return kimi(g);
        default: break;
    }

    std::vector<RewardBreakdown> out;
    out.reserve(g.size());
    for (const auto& r : g.responses) {
        switch (config.variant) {
            case Variant::VanillaTruncation:
                out.push_back(truncation_gate(r, config.target_length, config.rho));
                break;
            case Variant::ThinkPrune:
                out.push_back(truncation_gate(r, *resolved_target, config.rho));
                break;
            case Variant::L1Exact:
                out.push_back(l1_exact(r, config.target_length, config.alpha));
                break;
            case Variant::L1Max:
                out.push_back(l1_max(r, config.target_length, config.alpha, config.delta,
                                     config.l1max_sign));
                break;
            case Variant::Laser: out.push_back(laser(r, config.target_length, config.alpha)); break;
            case Variant::LaserD: out.push_back(laser_d(r, *resolved_target, config.alpha)); break;
            case Variant::LaserDE:
                out.push_back(laser_de(r, *resolved_target, config.alpha,
                                       config.exclude_invalid_from_exploration));
                break;
            case Variant::GroupEfficient:
            case Variant::Kimi: break;
        }
    }
    return out;
}

}  // namespace laserkit
