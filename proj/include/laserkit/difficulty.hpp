#pragma once

#include <cstddef>

#include "laserkit/types.hpp"

namespace laserkit {

/// Bucket a group of k rollouts by its correct count c:
/// Easy if c > 2k/3, Medium if k/3 < c <= 2k/3, Hard otherwise.
DifficultyLevel classify(std::size_t num_correct, std::size_t k);
DifficultyLevel classify(const RolloutGroup& g);

/// Smallest correct count that lands in `level` for group size k, i.e. the |C_d|
/// used by the expected-correct-responses rule. Hard is clamped to at least 1.
std::size_t min_correct(DifficultyLevel level, std::size_t k);

}  // namespace laserkit
