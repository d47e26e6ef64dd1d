#include "laserkit/difficulty.hpp"

#include <algorithm>

namespace laserkit {

// Compared in integers: c > 2k/3  <=>  3c > 2k.
DifficultyLevel classify(std::size_t num_correct, std::size_t k) {
    if (k == 0) throw ConfigError("difficulty classification needs k >= 1");
    if (3 * num_correct > 2 * k) return DifficultyLevel::Easy;
    if (3 * num_correct > k) return DifficultyLevel::Medium;
    return DifficultyLevel::Hard;
}

DifficultyLevel classify(const RolloutGroup& g) { return classify(g.num_correct(), g.size()); }

std::size_t min_correct(DifficultyLevel level, std::size_t k) {
    if (k == 0) throw ConfigError("min_correct needs k >= 1");
    switch (level) {
        case DifficultyLevel::Easy: return (2 * k) / 3 + 1;
        case DifficultyLevel::Medium: return k / 3 + 1;
        case DifficultyLevel::Hard: return 1;
    }
    return 1;
}

}  // namespace laserkit
