#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace laserkit {

using TokenCount = std::int64_t;

/// Thrown for invalid shaper / search / simulator configurations.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One sampled response. `correct` implies `format_valid`.
struct ResponseRecord {
    TokenCount length = 0;
    bool correct = false;
    bool format_valid = true;
    std::optional<std::string> text;

    bool operator==(const ResponseRecord&) const = default;
};

/// The k responses sampled for one question in one step.
struct RolloutGroup {
    std::string question_id;
    std::vector<ResponseRecord> responses;

    std::size_t size() const noexcept { return responses.size(); }
    std::size_t num_correct() const noexcept {
        std::size_t c = 0;
        for (const auto& r : responses) c += r.correct ? 1 : 0;
        return c;
    }
};

/// Ordered Hard < Medium < Easy by within-group correctness.
enum class DifficultyLevel : int { Hard = 0, Medium = 1, Easy = 2 };

inline constexpr DifficultyLevel kAllLevels[] = {DifficultyLevel::Easy, DifficultyLevel::Medium,
                                                 DifficultyLevel::Hard};

const char* to_string(DifficultyLevel level) noexcept;
DifficultyLevel difficulty_from_string(const std::string& name);

enum class Variant {
    VanillaTruncation,
    ThinkPrune,
    GroupEfficient,
    Kimi,
    L1Exact,
    L1Max,
    Laser,
    LaserD,
    LaserDE,
};

inline constexpr Variant kAllVariants[] = {
    Variant::VanillaTruncation, Variant::ThinkPrune, Variant::GroupEfficient,
    Variant::Kimi,              Variant::L1Exact,    Variant::L1Max,
    Variant::Laser,             Variant::LaserD,     Variant::LaserDE,
};

const char* to_string(Variant v) noexcept;
Variant variant_from_string(const std::string& name);

/// Whether the variant reads a per-group target resolved from difficulty or a schedule.
bool needs_resolved_target(Variant v) noexcept;

enum class L1MaxSign { AsPrinted, BudgetPenalizing };

const char* to_string(L1MaxSign s) noexcept;
L1MaxSign l1max_sign_from_string(const std::string& name);

struct ShaperConfig {
    Variant variant = Variant::Laser;
    double alpha = 0.5;
    TokenCount target_length = 4096;
    double rho = 0.0;
    double delta = 0.5;
    std::optional<std::map<DifficultyLevel, TokenCount>> adaptive_lengths;
    L1MaxSign l1max_sign = L1MaxSign::AsPrinted;
    /// LASER-DE only: withhold the overlong-incorrect bonus from invalid-format responses.
    bool exclude_invalid_from_exploration = false;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// total == correctness_term + control * length_term.
struct RewardBreakdown {
    double correctness_term = 0.0;
    double control = 0.0;
    double length_term = 0.0;
    double total = 0.0;

    bool operator==(const RewardBreakdown&) const = default;
};

}  // namespace laserkit
