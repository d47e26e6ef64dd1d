#include "laserkit/grpo_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "laserkit/difficulty.hpp"
#include "laserkit/format.hpp"
#include "laserkit/kernels.hpp"
#include "laserkit/reward.hpp"

namespace laserkit {

namespace {

constexpr double kAdvantageEps = 1e-8;
constexpr std::uint64_t kMonitorStream = 0x9e3779b97f4a7c15ull;

bool is_step_rule(Variant v) noexcept {
    switch (v) {
        case Variant::VanillaTruncation:
        case Variant::ThinkPrune:
        case Variant::Laser:
        case Variant::LaserD:
        case Variant::LaserDE: return true;
        default: return false;
    }
}

bool is_adaptive(Variant v) noexcept { return v == Variant::LaserD || v == Variant::LaserDE; }

bool is_truncating(Variant v) noexcept {
    return v == Variant::VanillaTruncation || v == Variant::ThinkPrune;
}

kernels::StepRule step_rule_of(Variant v) noexcept {
    if (is_truncating(v)) return kernels::StepRule::TruncationGate;
    if (v == Variant::LaserDE) return kernels::StepRule::LaserDE;
    return kernels::StepRule::Laser;
}

}  // namespace

void SimConfig::validate() const {
    if (classes.empty()) throw ConfigError("sim.classes must not be empty");
    std::size_t bank = 0;
    for (const auto& c : classes) {
        if (!(c.p_max >= 0.0 && c.p_max <= 1.0))
            throw ConfigError("sim.classes[" + c.name + "].p_max must lie in [0, 1]");
        if (!(c.tau > 0.0)) throw ConfigError("sim.classes[" + c.name + "].tau must be > 0");
        if (!(c.initial_length >= 1.0))
            throw ConfigError("sim.classes[" + c.name + "].initial_length must be >= 1");
        bank += c.count;
    }
    if (bank == 0) throw ConfigError("sim.classes must contain at least one question");
    if (k < 2) throw ConfigError("sim.k must be >= 2");
    if (batch < 1) throw ConfigError("sim.batch must be >= 1");
    if (steps < 0) throw ConfigError("sim.steps must be >= 0");
    if (!(sigma > 0.0)) throw ConfigError("sim.sigma must be > 0");
    if (!(learning_rate >= 0.0)) throw ConfigError("sim.learning_rate must be >= 0");
    if (!(format_valid_prob >= 0.0 && format_valid_prob <= 1.0))
        throw ConfigError("sim.format_valid_prob must lie in [0, 1]");
    if (monitoring_size < 1) throw ConfigError("monitoring.size must be >= 1");
    for (TokenCount t : think_prune_stages)
        if (t <= 0) throw ConfigError("sim.think_prune_stages entries must be > 0");
    shaper.validate();
    adapt.validate();
}

double correctness_probability(const SyntheticQuestion& q, TokenCount length) noexcept {
    return q.p_max * (1.0 - std::exp(-static_cast<double>(length) / q.tau));
}

SampledGroup rollout(const SyntheticQuestion& q, const PolicyParams& params, std::size_t k,
                     SimRng& rng, TokenCount context_window, double format_valid_prob) {
    SampledGroup out;
    out.group.question_id = q.id;
    out.class_index = q.class_index;
    out.group.responses.reserve(k);
    const double mu = params.mu.at(q.class_index);
    for (std::size_t i = 0; i < k; ++i) {
        const double log_len = mu + params.sigma * rng.normal();
        const double u_correct = rng.uniform();
        const double u_format = rng.uniform();

        const double raw = std::clamp(std::round(std::exp(log_len)), 1.0, 1e15);
        const auto raw_len = static_cast<TokenCount>(raw);
        ResponseRecord r;
        if (raw_len > context_window) {
            // Cut at the window before any answer was produced.
            r.length = context_window;
            r.correct = false;
            r.format_valid = false;
        } else {
            r.length = raw_len;
            r.format_valid = u_format < format_valid_prob;
            r.correct = r.format_valid && u_correct < correctness_probability(q, raw_len);
        }
        out.group.responses.push_back(r);
        out.log_lengths.push_back(log_len);
        out.raw_lengths.push_back(raw_len);
    }
    return out;
}

std::vector<double> group_advantage(std::span<const double> rewards) {
    std::vector<double> adv(rewards.size(), 0.0);
    if (rewards.empty()) return adv;
    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    const double sd = std::sqrt(var / n);
    for (std::size_t i = 0; i < rewards.size(); ++i)
        adv[i] = (rewards[i] - mean) / (sd + kAdvantageEps);
    return adv;
}

std::vector<double> surrogate_gradient(const PolicyParams& params,
                                       std::span<const ScoredResponse> scored) {
    const std::size_t classes = params.mu.size();
    std::vector<double> sum(classes, 0.0);
    std::vector<std::size_t> n(classes, 0);
    const double inv_var = 1.0 / (params.sigma * params.sigma);
    for (const auto& s : scored) {
        sum.at(s.class_index) += s.advantage * (s.log_length - params.mu[s.class_index]) * inv_var;
        ++n[s.class_index];
    }
    for (std::size_t c = 0; c < classes; ++c)
        sum[c] = n[c] ? sum[c] / static_cast<double>(n[c]) : 0.0;
    return sum;
}

PolicyParams policy_update(const PolicyParams& params, std::span<const ScoredResponse> scored) {
    PolicyParams next = params;
    if (params.learning_rate == 0.0) return next;
    const auto grad = surrogate_gradient(params, scored);
    for (std::size_t c = 0; c < next.mu.size(); ++c) next.mu[c] += params.learning_rate * grad[c];
    return next;
}

double surrogate_objective(const PolicyParams& params, std::span<const ScoredResponse> scored,
                           std::size_t class_index) {
    const double sigma = params.sigma;
    const double mu = params.mu.at(class_index);
    const double log_norm = std::log(sigma) + 0.5 * std::log(2.0 * std::numbers::pi);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : scored) {
        if (s.class_index != class_index) continue;
        const double d = s.log_length - mu;
        // Log-density of the log-normal at L = exp(log_length).
        const double logp = -s.log_length - log_norm - d * d / (2.0 * sigma * sigma);
        sum += s.advantage * logp;
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

double finite_difference_check(const PolicyParams& params, std::span<const ScoredResponse> scored,
                               double epsilon) {
    if (!(epsilon > 0.0)) throw ConfigError("finite difference epsilon must be > 0");
    const auto analytic = surrogate_gradient(params, scored);
    double worst = 0.0;
    for (std::size_t c = 0; c < params.mu.size(); ++c) {
        PolicyParams up = params, down = params;
        up.mu[c] += epsilon;
        down.mu[c] -= epsilon;
        const double fd =
            (surrogate_objective(up, scored, c) - surrogate_objective(down, scored, c)) /
            (2.0 * epsilon);
        const double scale = std::max({std::abs(analytic[c]), std::abs(fd), 1e-8});
        worst = std::max(worst, std::abs(analytic[c] - fd) / scale);
    }
    return worst;
}

std::vector<SyntheticQuestion> build_bank(const SimConfig& cfg) {
    std::vector<SyntheticQuestion> bank;
    for (std::size_t c = 0; c < cfg.classes.size(); ++c) {
        const auto& qc = cfg.classes[c];
        const std::string prefix = qc.name.empty() ? "c" + std::to_string(c) : qc.name;
        for (std::size_t i = 0; i < qc.count; ++i)
            bank.push_back({prefix + "-" + std::to_string(i), c, qc.p_max, qc.tau});
    }
    return bank;
}

PolicyParams initial_policy(const SimConfig& cfg) {
    PolicyParams p;
    p.sigma = cfg.sigma;
    p.learning_rate = cfg.learning_rate;
    for (const auto& c : cfg.classes) p.mu.push_back(std::log(c.initial_length));
    return p;
}

namespace {

class Trainer {
public:
    Trainer(const SimConfig& cfg, const RunOptions& options)
        : cfg_(cfg),
          options_(options),
          bank_(build_bank(cfg)),
          policy_(initial_policy(cfg)),
          adaptive_(AdaptiveState::initial(cfg.adapt)),
          rng_(cfg.seed),
          monitor_rng_(cfg.seed ^ kMonitorStream) {
        const auto picks =
            sample_indices(bank_.size(), MonitoringSpec{cfg.monitoring_size, cfg.seed ^ kMonitorStream});
        for (std::size_t i : picks) monitor_questions_.push_back(bank_[i]);
    }

    SimResult run() {
        SimResult result;
        for (std::int64_t step = 0; step < cfg_.steps; ++step)
            result.reports.push_back(train_step(step, result));
        result.adaptive = adaptive_;
        result.policy = policy_;
        return result;
    }

    std::vector<SampledGroup> sample_batch() {
        std::vector<std::size_t> picks(cfg_.batch);
        for (auto& p : picks) p = rng_.index(bank_.size());
        std::vector<SampledGroup> groups;
        groups.reserve(cfg_.batch);
        for (std::size_t p : picks)
            groups.push_back(rollout(bank_[p], policy_, cfg_.k, rng_, cfg_.adapt.context_window,
                                     cfg_.format_valid_prob));
        return groups;
    }

private:
    TokenCount group_target(std::int64_t step, DifficultyLevel level) const {
        const ShaperConfig& sh = cfg_.shaper;
        if (is_adaptive(sh.variant)) return adaptive_.target(level);
        if (sh.variant == Variant::ThinkPrune) {
            if (!cfg_.think_prune_stages.empty()) {
                const auto stages = static_cast<std::int64_t>(cfg_.think_prune_stages.size());
                const std::int64_t per = std::max<std::int64_t>(1, (cfg_.steps + stages - 1) / stages);
                return cfg_.think_prune_stages[static_cast<std::size_t>(
                    std::min(step / per, stages - 1))];
            }
            if (sh.adaptive_lengths) {
                if (auto it = sh.adaptive_lengths->find(level); it != sh.adaptive_lengths->end())
                    return it->second;
            }
        }
        return sh.target_length;
    }

    StepReport train_step(std::int64_t step, SimResult& result) {
        const auto groups = sample_batch();
        const ShaperConfig& sh = cfg_.shaper;
        const std::size_t total = groups.size() * cfg_.k;

        // Flatten into structure-of-arrays for the batch kernels.
        std::vector<double> lengths, targets, totals(total);
        std::vector<std::uint8_t> correct, valid;
        lengths.reserve(total);
        targets.reserve(total);
        correct.reserve(total);
        valid.reserve(total);
        std::size_t truncated = 0, num_correct = 0;
        double length_sum = 0.0;
        for (const auto& g : groups) {
            const TokenCount target = group_target(step, classify(g.group));
            const TokenCount limit = is_truncating(sh.variant) ? target : cfg_.adapt.context_window;
            for (std::size_t i = 0; i < g.group.responses.size(); ++i) {
                const auto& r = g.group.responses[i];
                lengths.push_back(static_cast<double>(r.length));
                targets.push_back(static_cast<double>(target));
                correct.push_back(r.correct ? 1 : 0);
                valid.push_back(r.format_valid ? 1 : 0);
                truncated += g.raw_lengths[i] > limit ? 1 : 0;
                num_correct += r.correct ? 1 : 0;
                length_sum += static_cast<double>(r.length);
            }
        }

        if (is_step_rule(sh.variant)) {
            const kernels::StepParams params{step_rule_of(sh.variant), sh.alpha, sh.rho,
                                             sh.exclude_invalid_from_exploration};
            kernels::step_rewards({lengths, targets, correct, valid}, params, totals);
        } else {
            std::size_t offset = 0;
            for (const auto& g : groups) {
                const auto shaped = shape(sh, g.group);
                for (const auto& b : shaped) totals[offset++] = b.total;
            }
        }

        std::vector<ScoredResponse> scored;
        scored.reserve(total);
        double reward_sum = 0.0;
        for (std::size_t gi = 0, offset = 0; gi < groups.size(); ++gi, offset += cfg_.k) {
            const std::span<const double> group_totals(totals.data() + offset, cfg_.k);
            const auto adv = group_advantage(group_totals);
            for (std::size_t i = 0; i < cfg_.k; ++i) {
                scored.push_back({groups[gi].class_index, groups[gi].log_lengths[i], adv[i]});
                reward_sum += group_totals[i];
            }
        }
        if (options_.record_rollouts) {
            for (std::size_t gi = 0, offset = 0; gi < groups.size(); ++gi) {
                for (const auto& r : groups[gi].group.responses) {
                    result.rollouts.push_back({step, groups[gi].group.question_id, r.length,
                                               r.correct, r.format_valid, std::nullopt});
                    result.rollout_totals.push_back(totals[offset++]);
                }
            }
        }

        policy_ = policy_update(policy_, scored);

        if (is_adaptive(sh.variant) && step % cfg_.adapt.period == 0) {
            std::vector<MonitoringSample> samples;
            samples.reserve(monitor_questions_.size());
            for (const auto& q : monitor_questions_)
                samples.push_back(rollout(q, policy_, cfg_.k, monitor_rng_,
                                          cfg_.adapt.context_window, cfg_.format_valid_prob)
                                      .group);
            adaptive_ = maybe_update(adaptive_, step, samples, cfg_.adapt, cfg_.k);
        }

        const double n = static_cast<double>(total);
        return {step,
                length_sum / n,
                static_cast<double>(num_correct) / n,
                reward_sum / n,
                adaptive_.targets,
                static_cast<double>(truncated) / n};
    }

    const SimConfig& cfg_;
    RunOptions options_;
    std::vector<SyntheticQuestion> bank_;
    std::vector<SyntheticQuestion> monitor_questions_;
    PolicyParams policy_;
    AdaptiveState adaptive_;
    SimRng rng_;
    SimRng monitor_rng_;
};

}  // namespace

SimResult run(const SimConfig& cfg, const RunOptions& options) {
    cfg.validate();
    if (needs_resolved_target(cfg.shaper.variant) && cfg.shaper.variant == Variant::ThinkPrune &&
        cfg.think_prune_stages.empty() && !cfg.shaper.adaptive_lengths)
        throw ConfigError("think_prune needs sim.think_prune_stages or shaper.adaptive_lengths");
    return Trainer(cfg, options).run();
}

TokenCount initial_length_quantile(const SimConfig& cfg, double q) {
    cfg.validate();
    Trainer trainer(cfg, {});
    std::vector<TokenCount> lengths;
    for (const auto& g : trainer.sample_batch())
        for (const auto& r : g.group.responses) lengths.push_back(r.length);
    std::sort(lengths.begin(), lengths.end());
    const auto idx = static_cast<std::size_t>(
        std::clamp(q, 0.0, 1.0) * static_cast<double>(lengths.size() - 1));
    return lengths[idx];
}

void write_trajectory_csv(std::ostream& os, std::span<const StepReport> reports) {
    os << "step,mean_length,accuracy,mean_total_reward,la_easy,la_medium,la_hard,truncation_ratio\n";
    for (const auto& r : reports) {
        os << r.step << ',' << format_double(r.mean_length) << ',' << format_double(r.accuracy)
           << ',' << format_double(r.mean_total_reward) << ','
           << r.targets[static_cast<int>(DifficultyLevel::Easy)] << ','
           << r.targets[static_cast<int>(DifficultyLevel::Medium)] << ','
           << r.targets[static_cast<int>(DifficultyLevel::Hard)] << ','
           << format_double(r.truncation_ratio) << '\n';
    }
}

}  // namespace laserkit
