#pragma once

// Subcommand bodies behind the laserkit executable. Each one reads from and
// writes to caller-supplied streams and returns the process exit code.

#include <iosfwd>
#include <string_view>

#include "laserkit/config.hpp"

namespace laserkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitConfigError = 2;

/// Appends correctness_term, control, length_term and total to every record.
/// Adaptive variants take their targets from shaper.adaptive_lengths, or else
/// from the controller replayed over the log (which needs an "adapt" section).
int cmd_shape(const RunConfig& cfg, std::istream& log, std::ostream& out, std::ostream& err);

/// Replays the controller over the log, one monitoring set per logged step,
/// and writes one (step, la_easy, la_medium, la_hard) row per update.
int cmd_adapt(const RunConfig& cfg, std::istream& log, std::ostream& out, std::ostream& err);

/// Runs the simulator; `rollouts`, when given, receives every shaped response.
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream* rollouts,
                 std::ostream& err);

/// mode: "keywords" (one row per non-blank input line), "budget" (the input is
/// one response, forced at every configured budget) or "summary" (per-step
/// means of a rollout log).
int cmd_analyze(const RunConfig& cfg, std::string_view mode, std::istream& in, std::ostream& out,
                std::ostream& err);

}  // namespace laserkit
