#pragma once

// Run configuration read from one JSON file. Every section is optional and
// falls back to library defaults; unknown keys are rejected by name.
//
//   {
//     "seed": 7,
//     "format": "csv",
//     "shaper":     { "variant": "laser_d", "alpha": 0.5, ... },
//     "adapt":      { "lower_bound": 2048, "interval": 512, ... },
//     "monitoring": { "size": 500 },
//     "sim":        { "classes": [ ... ], "steps": 200, ... },
//     "analyze":    { "budgets": [500, 1000] },
//     "io":         { "input": "log.jsonl", "out": "out.csv", "rollouts": "r.jsonl" }
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "laserkit/adaptive.hpp"
#include "laserkit/grpo_sim.hpp"
#include "laserkit/rollout_io.hpp"
#include "laserkit/types.hpp"

namespace laserkit {

enum class OutputFormat { Csv, Jsonl };

const char* to_string(OutputFormat f) noexcept;
OutputFormat output_format_from_string(const std::string& name);

struct IoPaths {
    std::optional<std::string> input;
    std::optional<std::string> out;
    std::optional<std::string> rollouts;
};

struct RunConfig {
    std::uint64_t seed = 0;
    OutputFormat format = OutputFormat::Csv;
    ShaperConfig shaper;
    SearchConfig adapt;
    bool has_adapt = false;  // whether the file carried an "adapt" section
    std::size_t monitoring_size = 500;
    /// Without sim.classes, an easy / medium / hard bank of 100 questions each.
    /// shaper, adapt, seed and monitoring_size are filled in by sim_config().
    SimConfig sim;
    std::vector<std::size_t> budgets;
    IoPaths io;

    void validate() const;

    /// The simulator view with the shared sections folded in.
    SimConfig sim_config() const;

    /// Fully resolved parameters, I/O paths excluded.
    nlohmann::ordered_json echo() const;

    /// "# " followed by the compact echo.
    std::string header_line() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig parse_run_config_text(std::string_view text);
RunConfig load_run_config(const std::string& path);

}  // namespace laserkit
