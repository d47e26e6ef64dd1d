#include "laserkit/commands.hpp"

#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "laserkit/analysis.hpp"
#include "laserkit/difficulty.hpp"
#include "laserkit/format.hpp"
#include "laserkit/grpo_sim.hpp"
#include "laserkit/reward.hpp"
#include "laserkit/rollout_io.hpp"

namespace laserkit {

using nlohmann::ordered_json;

namespace {

/// Raised for problems with the input data rather than the configuration.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_all(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<RolloutLogRecord> read_log(std::istream& in, std::ostream& err) {
    ParseResult parsed = parse_log(in);
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) err << "line " << e.line << ": " << e.message << '\n';
        throw DataError(std::to_string(parsed.errors.size()) + " malformed record(s)");
    }
    return std::move(parsed.records);
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::invalid_argument& e) {
        err << "data error: " << e.what() << '\n';
        return kExitDataError;
    }
}

/// Groups keyed by (step, question_id) with the record indices they came from.
struct IndexedGroup {
    std::int64_t step = 0;
    RolloutGroup group;
    std::vector<std::size_t> rows;
};

std::vector<IndexedGroup> index_groups(const std::vector<RolloutLogRecord>& records) {
    std::vector<IndexedGroup> groups;
    std::map<std::pair<std::int64_t, std::string>, std::size_t> slot;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        auto [it, inserted] = slot.try_emplace({r.step, r.question_id}, groups.size());
        if (inserted) groups.push_back({r.step, {r.question_id, {}}, {}});
        IndexedGroup& g = groups[it->second];
        g.group.responses.push_back(r.response());
        g.rows.push_back(i);
    }
    return groups;
}

std::size_t uniform_group_size(const std::vector<IndexedGroup>& groups) {
    const std::size_t k = groups.front().group.size();
    for (const auto& g : groups)
        if (g.group.size() != k)
            throw DataError("group (" + std::to_string(g.step) + ", " + g.group.question_id +
                            ") has " + std::to_string(g.group.size()) + " responses, expected " +
                            std::to_string(k));
    return k;
}

/// Replays the controller step by step. The targets applied to a step are the
/// ones after that step's update, since the logged groups are the monitoring data.
template <class OnStep>
AdaptiveState replay_controller(const RunConfig& cfg, const std::vector<IndexedGroup>& groups,
                                OnStep&& on_step) {
    const std::size_t k = uniform_group_size(groups);
    std::map<std::int64_t, std::vector<std::size_t>> by_step;
    for (std::size_t i = 0; i < groups.size(); ++i) by_step[groups[i].step].push_back(i);

    AdaptiveState state = AdaptiveState::initial(cfg.adapt);
    for (const auto& [step, members] : by_step) {
        std::vector<LoggedGroup> logged;
        logged.reserve(members.size());
        for (std::size_t i : members) logged.push_back({step, groups[i].group});
        const MonitoringSpec spec{cfg.monitoring_size, cfg.seed + static_cast<std::uint64_t>(step)};
        const auto sample = sample_monitoring(logged, spec);
        state = maybe_update(state, step, sample, cfg.adapt, k);
        on_step(members, state);
    }
    return state;
}

TokenCount fixed_target(const ShaperConfig& sh, DifficultyLevel level) {
    if (sh.adaptive_lengths)
        if (auto it = sh.adaptive_lengths->find(level); it != sh.adaptive_lengths->end())
            return it->second;
    return sh.target_length;
}

bool is_controller_variant(Variant v) { return v == Variant::LaserD || v == Variant::LaserDE; }

void write_shaped(const RunConfig& cfg, const std::vector<RolloutLogRecord>& records,
                  const std::vector<RewardBreakdown>& shaped, std::ostream& out) {
    out << cfg.header_line() << '\n';
    if (cfg.format == OutputFormat::Jsonl) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            ordered_json obj = ordered_json::parse(serialize(records[i]));
            obj["correctness_term"] = shaped[i].correctness_term;
            obj["control"] = shaped[i].control;
            obj["length_term"] = shaped[i].length_term;
            obj["total"] = shaped[i].total;
            out << obj.dump() << '\n';
        }
        return;
    }
    out << "step,question_id,length,correct,format_valid,correctness_term,control,length_term,"
           "total\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto& b = shaped[i];
        out << r.step << ',' << csv_field(r.question_id) << ',' << r.length << ','
            << bool_text(r.correct) << ',' << bool_text(r.format_valid) << ','
            << format_double(b.correctness_term) << ',' << format_double(b.control) << ','
            << format_double(b.length_term) << ',' << format_double(b.total) << '\n';
    }
}

void write_trajectory_jsonl(std::ostream& os, const std::vector<StepReport>& reports) {
    for (const auto& r : reports) {
        ordered_json obj;
        obj["step"] = r.step;
        obj["mean_length"] = r.mean_length;
        obj["accuracy"] = r.accuracy;
        obj["mean_total_reward"] = r.mean_total_reward;
        obj["la_easy"] = r.targets[static_cast<int>(DifficultyLevel::Easy)];
        obj["la_medium"] = r.targets[static_cast<int>(DifficultyLevel::Medium)];
        obj["la_hard"] = r.targets[static_cast<int>(DifficultyLevel::Hard)];
        obj["truncation_ratio"] = r.truncation_ratio;
        os << obj.dump() << '\n';
    }
}

void analyze_keywords(const RunConfig& cfg, std::istream& in, std::ostream& out) {
    out << cfg.header_line() << '\n';
    const bool csv = cfg.format == OutputFormat::Csv;
    if (csv) {
        out << "line,tokens";
        for (auto kw : kReflectionKeywords) {
            std::string col(kw);
            for (char& c : col)
                if (c == ' ') c = '_';
            out << ',' << col;
        }
        out << ",total,density\n";
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const KeywordReport rep = keyword_density(line);
        if (csv) {
            out << lineno << ',' << rep.tokens;
            for (auto c : rep.counts) out << ',' << c;
            out << ',' << rep.total() << ',' << format_double(rep.density) << '\n';
        } else {
            ordered_json obj;
            obj["line"] = lineno;
            obj["tokens"] = rep.tokens;
            for (std::size_t i = 0; i < kReflectionKeywords.size(); ++i)
                obj[std::string(kReflectionKeywords[i])] = rep.counts[i];
            obj["total"] = rep.total();
            obj["density"] = rep.density;
            out << obj.dump() << '\n';
        }
    }
}

void analyze_budget(const RunConfig& cfg, std::istream& in, std::ostream& out) {
    const std::string text = read_all(in);
    const std::size_t thinking = thinking_length(text);
    out << cfg.header_line() << '\n';
    const bool csv = cfg.format == OutputFormat::Csv;
    if (csv) out << "budget,thinking_tokens,kept_tokens,forced\n";
    for (std::size_t budget : cfg.budgets) {
        const std::string forced = budget_force_text(text, budget);
        const bool was_forced = thinking > budget;
        const std::size_t kept = was_forced ? budget : thinking;
        if (csv) {
            out << budget << ',' << thinking << ',' << kept << ',' << bool_text(was_forced) << '\n';
        } else {
            ordered_json obj;
            obj["budget"] = budget;
            obj["thinking_tokens"] = thinking;
            obj["kept_tokens"] = kept;
            obj["forced"] = was_forced;
            obj["text"] = forced;
            out << obj.dump() << '\n';
        }
    }
}

void analyze_summary(const RunConfig& cfg, std::istream& in, std::ostream& out,
                     std::ostream& err) {
    std::vector<SummaryInput> inputs;
    std::string line;
    std::size_t lineno = 0, bad = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            const RolloutLogRecord r = parse_record(line);
            SummaryInput s{r.step, r.length, r.correct, r.format_valid, std::nullopt, r.text};
            const auto obj = nlohmann::json::parse(line);
            if (auto it = obj.find("total"); it != obj.end()) {
                if (!it->is_number()) throw std::invalid_argument("field \"total\" must be a number");
                s.total = it->get<double>();
            }
            inputs.push_back(std::move(s));
        } catch (const std::invalid_argument& e) {
            err << "line " << lineno << ": " << e.what() << '\n';
            ++bad;
        }
    }
    if (bad) throw DataError(std::to_string(bad) + " malformed record(s)");

    const auto rows = summarize(inputs);
    out << cfg.header_line() << '\n';
    if (cfg.format == OutputFormat::Csv) {
        write_summary_csv(out, rows);
        return;
    }
    for (const auto& r : rows) {
        ordered_json obj;
        obj["step"] = r.step;
        obj["responses"] = r.responses;
        obj["mean_length"] = r.mean_length;
        obj["accuracy"] = r.accuracy;
        obj["mean_reward"] = r.mean_reward;
        if (r.density) obj["density"] = *r.density;
        out << obj.dump() << '\n';
    }
}

}  // namespace

int cmd_shape(const RunConfig& cfg, std::istream& log, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ShaperConfig& sh = cfg.shaper;
        const bool controller = is_controller_variant(sh.variant) && !sh.adaptive_lengths;
        if (controller && !cfg.has_adapt)
            throw ConfigError(std::string("variant ") + to_string(sh.variant) +
                              " needs an adapt section or shaper.adaptive_lengths");
        const auto records = read_log(log, err);
        if (records.empty()) return;

        const auto groups = index_groups(records);
        std::vector<RewardBreakdown> shaped(records.size());
        auto shape_group = [&](const IndexedGroup& g, std::optional<TokenCount> target) {
            const auto b = shape(sh, g.group, target);
            for (std::size_t i = 0; i < b.size(); ++i) shaped[g.rows[i]] = b[i];
        };

        if (controller) {
            replay_controller(cfg, groups,
                              [&](const std::vector<std::size_t>& members, const AdaptiveState& s) {
                                  for (std::size_t i : members)
                                      shape_group(groups[i], s.target(classify(groups[i].group)));
                              });
        } else {
            for (const auto& g : groups) {
                std::optional<TokenCount> target;
                if (needs_resolved_target(sh.variant))
                    target = fixed_target(sh, classify(g.group));
                shape_group(g, target);
            }
        }
        write_shaped(cfg, records, shaped, out);
    });
}

int cmd_adapt(const RunConfig& cfg, std::istream& log, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto records = read_log(log, err);
        std::vector<TargetSnapshot> history;
        if (!records.empty())
            history = replay_controller(cfg, index_groups(records),
                                        [](const auto&, const AdaptiveState&) {})
                          .history;
        out << cfg.header_line() << '\n';
        if (cfg.format == OutputFormat::Csv)
            write_history_csv(out, history);
        else
            write_history_jsonl(out, history);
    });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream* rollouts,
                 std::ostream& err) {
    return guarded(err, [&] {
        const SimResult result = run(cfg.sim_config(), RunOptions{rollouts != nullptr});
        out << cfg.header_line() << '\n';
        if (cfg.format == OutputFormat::Csv)
            write_trajectory_csv(out, result.reports);
        else
            write_trajectory_jsonl(out, result.reports);
        if (rollouts) {
            *rollouts << cfg.header_line() << '\n';
            for (std::size_t i = 0; i < result.rollouts.size(); ++i) {
                ordered_json obj = ordered_json::parse(serialize(result.rollouts[i]));
                obj["total"] = result.rollout_totals[i];
                *rollouts << obj.dump() << '\n';
            }
        }
    });
}

int cmd_analyze(const RunConfig& cfg, std::string_view mode, std::istream& in, std::ostream& out,
                std::ostream& err) {
    return guarded(err, [&] {
        if (mode == "keywords")
            analyze_keywords(cfg, in, out);
        else if (mode == "budget")
            analyze_budget(cfg, in, out);
        else if (mode == "summary")
            analyze_summary(cfg, in, out, err);
        else
            throw ConfigError("unknown analyze mode '" + std::string(mode) +
                              "' (expected keywords, budget or summary)");
    });
}

}  // namespace laserkit
