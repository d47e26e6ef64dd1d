#include "laserkit/rollout_io.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace laserkit {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw std::invalid_argument(std::string("missing field \"") + key + '"');
    return *it;
}

std::int64_t require_int(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number_integer())
        throw std::invalid_argument(std::string("field \"") + key + "\" must be an integer");
    return v.get<std::int64_t>();
}

bool require_bool(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_boolean())
        throw std::invalid_argument(std::string("field \"") + key + "\" must be a boolean");
    return v.get<bool>();
}

bool skippable(std::string_view line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string_view::npos || line[first] == '#';
}

}  // namespace

RolloutLogRecord parse_record(std::string_view line) {
    json obj;
    try {
        obj = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw std::invalid_argument("record must be a JSON object");

    RolloutLogRecord r;
    r.step = require_int(obj, "step");
    const json& qid = require(obj, "question_id");
    if (!qid.is_string()) throw std::invalid_argument("field \"question_id\" must be a string");
    r.question_id = qid.get<std::string>();
    r.length = require_int(obj, "length");
    if (r.length < 0) throw std::invalid_argument("field \"length\" must be non-negative");
    r.correct = require_bool(obj, "correct");
    r.format_valid = require_bool(obj, "format_valid");
    if (r.correct && !r.format_valid)
        throw std::invalid_argument("a correct response must have valid format");
    if (auto it = obj.find("text"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw std::invalid_argument("field \"text\" must be a string");
        r.text = it->get<std::string>();
    }
    return r;
}

ParseResult parse_log(std::istream& in) {
    ParseResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        try {
            result.records.push_back(parse_record(line));
        } catch (const std::invalid_argument& e) {
            result.errors.push_back({lineno, e.what()});
        }
    }
    return result;
}

ParseResult parse_log_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_log(in);
}

std::string serialize(const RolloutLogRecord& r) {
    nlohmann::ordered_json obj;
    obj["step"] = r.step;
    obj["question_id"] = r.question_id;
    obj["length"] = r.length;
    obj["correct"] = r.correct;
    obj["format_valid"] = r.format_valid;
    if (r.text) obj["text"] = *r.text;
    return obj.dump();
}

void write_log(std::ostream& os, std::span<const RolloutLogRecord> records) {
    for (const auto& r : records) os << serialize(r) << '\n';
}

std::vector<LoggedGroup> group_records(std::span<const RolloutLogRecord> records) {
    std::vector<LoggedGroup> groups;
    std::map<std::pair<std::int64_t, std::string>, std::size_t> index;
    for (const auto& r : records) {
        auto [it, inserted] = index.try_emplace({r.step, r.question_id}, groups.size());
        if (inserted) groups.push_back({r.step, RolloutGroup{r.question_id, {}}});
        groups[it->second].group.responses.push_back(r.response());
    }
    return groups;
}

std::vector<RolloutLogRecord> flatten(std::span<const LoggedGroup> groups) {
    std::vector<RolloutLogRecord> out;
    for (const auto& g : groups)
        for (const auto& resp : g.group.responses)
            out.push_back({g.step, g.group.question_id, resp.length, resp.correct,
                           resp.format_valid, resp.text});
    return out;
}

std::vector<std::size_t> sample_indices(std::size_t population, const MonitoringSpec& spec) {
    if (spec.size == 0) throw ConfigError("monitoring.size must be >= 1");
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t take = std::min(spec.size, population);
    std::mt19937_64 rng(spec.seed);
    // Partial Fisher-Yates over the first `take` slots.
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, population - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<MonitoringSample> sample_monitoring(std::span<const LoggedGroup> groups,
                                                const MonitoringSpec& spec) {
    std::vector<MonitoringSample> out;
    for (std::size_t i : sample_indices(groups.size(), spec)) out.push_back(groups[i].group);
    return out;
}

}  // namespace laserkit
