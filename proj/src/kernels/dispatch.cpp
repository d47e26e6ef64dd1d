#include <cstdlib>
#include <cstring>

#include "laserkit/kernels.hpp"

namespace laserkit::kernels {

const char* to_string(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if LASERKIT_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa detect_isa() noexcept {
    if (const char* forced = std::getenv("LASERKIT_ISA"); forced && std::strcmp(forced, "scalar") == 0)
        return Isa::Scalar;
    return cpu_supports(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

KernelTable table_for(Isa isa) {
#if LASERKIT_HAVE_AVX2_KERNELS
    if (isa == Isa::Avx2 && cpu_supports(Isa::Avx2))
        return {Isa::Avx2, &step_rewards_avx2, &count_at_most_avx2};
#endif
    (void)isa;
    return {Isa::Scalar, &step_rewards_scalar, &count_at_most_scalar};
}

const KernelTable& active() {
    static const KernelTable table = table_for(detect_isa());
    return table;
}

void step_rewards(const StepBatch& batch, const StepParams& params, std::span<double> totals) {
    active().step_rewards(batch, params, totals);
}

std::size_t count_at_most(std::span<const TokenCount> values, TokenCount limit) {
    return active().count_at_most(values, limit);
}

}  // namespace laserkit::kernels
