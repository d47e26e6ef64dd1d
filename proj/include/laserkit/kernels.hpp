#pragma once

// Batch kernels behind the reward engine and the target-length search.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2
// variant chosen at runtime. The kernels only compare, select and add
// constants, so all variants produce bit-identical results; the
// equivalence tests assert exact equality.

#include <cstddef>
#include <cstdint>
#include <span>

#include "laserkit/types.hpp"

namespace laserkit::kernels {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa) noexcept;

/// Step-shaped rules that depend only on (length, outcome, threshold).
enum class StepRule { TruncationGate, Laser, LaserDE };

struct StepParams {
    StepRule rule = StepRule::Laser;
    double alpha = 0.5;
    double rho = 0.0;
    bool exclude_invalid = false;
};

/// Structure-of-arrays view over a batch of responses. All spans have equal size.
struct StepBatch {
    std::span<const double> lengths;
    std::span<const double> targets;  // per-response threshold (L_T or resolved L_A)
    std::span<const std::uint8_t> correct;
    std::span<const std::uint8_t> format_valid;
};

using StepRewardsFn = void (*)(const StepBatch&, const StepParams&, std::span<double> totals);
using CountAtMostFn = std::size_t (*)(std::span<const TokenCount> values, TokenCount limit);

void step_rewards_scalar(const StepBatch& batch, const StepParams& params,
                         std::span<double> totals);
std::size_t count_at_most_scalar(std::span<const TokenCount> values, TokenCount limit);

#if defined(__x86_64__) || defined(_M_X64)
#define LASERKIT_HAVE_AVX2_KERNELS 1
void step_rewards_avx2(const StepBatch& batch, const StepParams& params,
                       std::span<double> totals);
std::size_t count_at_most_avx2(std::span<const TokenCount> values, TokenCount limit);
#else
#define LASERKIT_HAVE_AVX2_KERNELS 0
#endif

bool cpu_supports(Isa isa) noexcept;

/// Best ISA for this CPU, unless LASERKIT_ISA=scalar is set in the environment.
Isa detect_isa() noexcept;

struct KernelTable {
    Isa isa;
    StepRewardsFn step_rewards;
    CountAtMostFn count_at_most;
};

KernelTable table_for(Isa isa);

/// Table selected once by detect_isa().
const KernelTable& active();

// Convenience wrappers over active().
void step_rewards(const StepBatch& batch, const StepParams& params, std::span<double> totals);
std::size_t count_at_most(std::span<const TokenCount> values, TokenCount limit);

}  // namespace laserkit::kernels
