#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laserkit/types.hpp"

namespace laserkit {

/// Self-reflection markers tracked by keyword_density, in report order.
inline constexpr std::array<std::string_view, 7> kReflectionKeywords = {
    "recheck", "rethink", "try again", "wait", "alternatively", "retry", "however"};

struct KeywordReport {
    std::array<std::size_t, kReflectionKeywords.size()> counts{};
    std::size_t tokens = 0;
    double density = 0.0;  // sum(counts) / max(tokens, 1)

    std::size_t total() const noexcept;
    std::size_t count(std::string_view keyword) const;
};

/// Plain whitespace split.
std::vector<std::string_view> whitespace_tokens(std::string_view text);

/// Whitespace split, dropping chunks with no ASCII letter or digit (bare punctuation).
std::vector<std::string_view> word_tokens(std::string_view text);

/// Case-insensitive occurrence counts over the lower-cased word tokens joined by
/// single spaces; "try again" matches across two tokens.
KeywordReport keyword_density(std::string_view text);

inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kForcedSuffix = "</think>\n\n**Final Answer.**";

/// Keeps the first `budget` thinking tokens and appends kForcedSuffix when the
/// thinking segment is longer than `budget`; otherwise returns the tokens joined
/// by single spaces. With `answer_suffix_present`, tokens from the first one
/// containing "</think>" onward are the answer and do not count as thinking.
std::string budget_force(std::span<const std::string> thinking_tokens, bool answer_suffix_present,
                         std::size_t budget);

/// Same rule applied to raw text; an unforced input is returned byte-for-byte
/// and a forced one keeps the original bytes up to the end of the last kept token.
std::string budget_force_text(std::string_view text, std::size_t budget);

/// Whitespace token count of the text before the first "</think>".
std::size_t thinking_length(std::string_view text);

inline constexpr std::array<std::size_t, 5> kBudgetSweep = {500, 1000, 2000, 4000, 8000};

/// One logged response, optionally already shaped.
struct SummaryInput {
    std::int64_t step = 0;
    TokenCount length = 0;
    bool correct = false;
    bool format_valid = true;
    std::optional<double> total;
    std::optional<std::string> text;
};

struct SummaryRow {
    std::int64_t step = 0;
    std::size_t responses = 0;
    double mean_length = 0.0;
    double accuracy = 0.0;
    double mean_reward = 0.0;
    std::optional<double> density;  // only when some response carries text

    bool operator==(const SummaryRow&) const = default;
};

/// Per-step means in ascending step order. Responses without a total
/// contribute their outcome reward (+1 / -0.5 / -1).
std::vector<SummaryRow> summarize(std::span<const SummaryInput> inputs);

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);

}  // namespace laserkit
