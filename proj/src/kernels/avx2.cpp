// Compiled with -mavx2; only called after a runtime CPU check.

#include <immintrin.h>

#include <cstring>

#include "laserkit/kernels.hpp"

namespace laserkit::kernels {

namespace {

inline __m256d byte_mask4(const std::uint8_t* p) {
    std::uint32_t bits;
    std::memcpy(&bits, p, sizeof(bits));
    const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(bits)));
    return _mm256_castsi256_pd(_mm256_cmpgt_epi64(wide, _mm256_setzero_si256()));
}

}  // namespace

void step_rewards_avx2(const StepBatch& batch, const StepParams& params,
                       std::span<double> totals) {
    const std::size_t n = batch.lengths.size();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d wrong = _mm256_set1_pd(-0.5);
    const __m256d invalid = _mm256_set1_pd(-1.0);
    const __m256d alpha = _mm256_set1_pd(params.alpha);
    const __m256d rho = _mm256_set1_pd(params.rho);
    const __m256d all = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    const __m256d explore_ok = params.exclude_invalid ? _mm256_setzero_pd() : all;

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d len = _mm256_loadu_pd(batch.lengths.data() + i);
        const __m256d tgt = _mm256_loadu_pd(batch.targets.data() + i);
        const __m256d correct = byte_mask4(batch.correct.data() + i);
        const __m256d valid = byte_mask4(batch.format_valid.data() + i);
        const __m256d within = _mm256_cmp_pd(len, tgt, _CMP_LE_OQ);
        const __m256d base = _mm256_blendv_pd(_mm256_blendv_pd(invalid, wrong, valid), one, correct);

        __m256d total;
        switch (params.rule) {
            case StepRule::TruncationGate: total = _mm256_blendv_pd(rho, base, within); break;
            case StepRule::Laser: {
                const __m256d bonus = _mm256_and_pd(_mm256_and_pd(correct, within), alpha);
                total = _mm256_add_pd(base, bonus);
                break;
            }
            case StepRule::LaserDE:
            default: {
                const __m256d short_correct = _mm256_and_pd(correct, within);
                const __m256d long_wrong = _mm256_andnot_pd(
                    correct, _mm256_andnot_pd(within, _mm256_or_pd(valid, explore_ok)));
                const __m256d bonus =
                    _mm256_and_pd(_mm256_or_pd(short_correct, long_wrong), alpha);
                total = _mm256_add_pd(base, bonus);
                break;
            }
        }
        _mm256_storeu_pd(totals.data() + i, total);
    }
    if (i < n) {
        const StepBatch tail{batch.lengths.subspan(i), batch.targets.subspan(i),
                             batch.correct.subspan(i), batch.format_valid.subspan(i)};
        step_rewards_scalar(tail, params, totals.subspan(i));
    }
}

std::size_t count_at_most_avx2(std::span<const TokenCount> values, TokenCount limit) {
    const std::size_t n = values.size();
    const __m256i lim = _mm256_set1_epi64x(limit);
    __m256i above = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i v =
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values.data() + i));
        // Each lane of the compare is -1 where v > limit.
        above = _mm256_sub_epi64(above, _mm256_cmpgt_epi64(v, lim));
    }
    alignas(32) std::int64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), above);
    const auto over = static_cast<std::size_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
    return (i - over) + count_at_most_scalar(values.subspan(i), limit);
}

}  // namespace laserkit::kernels
