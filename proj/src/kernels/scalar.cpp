#include "laserkit/kernels.hpp"

namespace laserkit::kernels {

void step_rewards_scalar(const StepBatch& batch, const StepParams& params,
                         std::span<double> totals) {
    const std::size_t n = batch.lengths.size();
    for (std::size_t i = 0; i < n; ++i) {
        const bool correct = batch.correct[i] != 0;
        const bool valid = batch.format_valid[i] != 0;
        const double base = correct ? 1.0 : (valid ? -0.5 : -1.0);
        const bool within = batch.lengths[i] <= batch.targets[i];
        double total = base;
        switch (params.rule) {
            case StepRule::TruncationGate: total = within ? base : params.rho; break;
            case StepRule::Laser:
                if (correct && within) total = base + params.alpha;
                break;
            case StepRule::LaserDE:
                if (correct && within) total = base + params.alpha;
                else if (!correct && !within && (valid || !params.exclude_invalid))
                    total = base + params.alpha;
                break;
        }
        totals[i] = total;
    }
}

std::size_t count_at_most_scalar(std::span<const TokenCount> values, TokenCount limit) {
    std::size_t c = 0;
    for (TokenCount v : values) c += v <= limit ? 1 : 0;
    return c;
}

}  // namespace laserkit::kernels
