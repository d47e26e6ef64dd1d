#pragma once

// Line-oriented rollout logs: one JSON object per line with the fields
//   step (integer), question_id (string), length (integer),
//   correct (boolean), format_valid (boolean), text (string, optional).
// Unknown fields are ignored. Blank lines and lines starting with '#' are
// skipped so that outputs can carry a provenance header.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laserkit/adaptive.hpp"
#include "laserkit/types.hpp"

namespace laserkit {

struct RolloutLogRecord {
    std::int64_t step = 0;
    std::string question_id;
    TokenCount length = 0;
    bool correct = false;
    bool format_valid = true;
    std::optional<std::string> text;

    ResponseRecord response() const { return {length, correct, format_valid, text}; }

    bool operator==(const RolloutLogRecord&) const = default;
};

struct ParseError {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct ParseResult {
    std::vector<RolloutLogRecord> records;
    std::vector<ParseError> errors;

    bool ok() const noexcept { return errors.empty(); }
};

/// Parses one record. Throws std::invalid_argument on malformed input.
RolloutLogRecord parse_record(std::string_view line);

/// Order-preserving; malformed lines are reported and skipped.
ParseResult parse_log(std::istream& in);
ParseResult parse_log_text(std::string_view text);

/// Canonical field order, no trailing newline.
std::string serialize(const RolloutLogRecord& r);
void write_log(std::ostream& os, std::span<const RolloutLogRecord> records);

struct LoggedGroup {
    std::int64_t step = 0;
    RolloutGroup group;
};

/// Stable grouping by (step, question_id) in first-appearance order.
std::vector<LoggedGroup> group_records(std::span<const RolloutLogRecord> records);

std::vector<RolloutLogRecord> flatten(std::span<const LoggedGroup> groups);

struct MonitoringSpec {
    std::size_t size = 500;
    std::uint64_t seed = 0;
};

/// Uniform sample without replacement of min(size, |groups|) groups, returned
/// in their original order. Deterministic under spec.seed.
std::vector<std::size_t> sample_indices(std::size_t population, const MonitoringSpec& spec);
std::vector<MonitoringSample> sample_monitoring(std::span<const LoggedGroup> groups,
                                                const MonitoringSpec& spec);

}  // namespace laserkit
