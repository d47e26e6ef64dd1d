#include "laserkit/types.hpp"

#include <string_view>

namespace laserkit {

const char* to_string(DifficultyLevel level) noexcept {
    switch (level) {
        case DifficultyLevel::Easy: return "easy";
        case DifficultyLevel::Medium: return "medium";
        case DifficultyLevel::Hard: return "hard";
    }
    return "?";
}

DifficultyLevel difficulty_from_string(const std::string& name) {
    if (name == "easy") return DifficultyLevel::Easy;
    if (name == "medium") return DifficultyLevel::Medium;
    if (name == "hard") return DifficultyLevel::Hard;
    throw ConfigError("unknown difficulty level '" + name + "'");
}

namespace {

struct VariantName {
    Variant variant;
    std::string_view name;
};

constexpr VariantName kVariantNames[] = {
    {Variant::VanillaTruncation, "vanilla_truncation"},
    {Variant::ThinkPrune, "think_prune"},
    {Variant::GroupEfficient, "group_efficient"},
    {Variant::Kimi, "kimi"},
    {Variant::L1Exact, "l1_exact"},
    {Variant::L1Max, "l1_max"},
    {Variant::Laser, "laser"},
    {Variant::LaserD, "laser_d"},
    {Variant::LaserDE, "laser_de"},
};

}  // namespace

const char* to_string(Variant v) noexcept {
    for (const auto& entry : kVariantNames)
        if (entry.variant == v) return entry.name.data();
    return "?";
}

Variant variant_from_string(const std::string& name) {
    for (const auto& entry : kVariantNames)
        if (entry.name == name) return entry.variant;
    throw ConfigError("unknown shaper variant '" + name + "'");
}

bool needs_resolved_target(Variant v) noexcept {
    return v == Variant::ThinkPrune || v == Variant::LaserD || v == Variant::LaserDE;
}

const char* to_string(L1MaxSign s) noexcept {
    return s == L1MaxSign::AsPrinted ? "as_printed" : "budget_penalizing";
}

L1MaxSign l1max_sign_from_string(const std::string& name) {
    if (name == "as_printed") return L1MaxSign::AsPrinted;
    if (name == "budget_penalizing") return L1MaxSign::BudgetPenalizing;
    throw ConfigError("unknown l1max_sign '" + name + "'");
}

void ShaperConfig::validate() const {
    if (!(alpha >= 0.0)) throw ConfigError("shaper.alpha must be >= 0");
    if (target_length <= 0) throw ConfigError("shaper.target_length must be > 0");
    if (adaptive_lengths) {
        if (!needs_resolved_target(variant))
            throw ConfigError(std::string("shaper.adaptive_lengths is not used by variant ") +
                              to_string(variant));
        for (const auto& [level, la] : *adaptive_lengths)
            if (la <= 0)
                throw ConfigError(std::string("shaper.adaptive_lengths.") + to_string(level) +
                                  " must be > 0");
    }
}

}  // namespace laserkit
