#include "laserkit/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "laserkit/analysis.hpp"

namespace laserkit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* json_type(const json& v) { return v.type_name(); }

/// Typed access to one JSON object; finish() rejects keys nobody asked for.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(label() + " must be an object");
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw type_error(key, "a number", *v);
            out = v->get<double>();
        }
    }

    template <class Int>
    void integer(const std::string& key, Int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) throw type_error(key, "an integer", *v);
            if constexpr (std::is_unsigned_v<Int>) {
                if (v->is_number_unsigned()) {
                    out = static_cast<Int>(v->get<std::uint64_t>());
                    return;
                }
                if (v->get<std::int64_t>() < 0) throw ConfigError(name(key) + " must be >= 0");
            }
            out = static_cast<Int>(v->get<std::int64_t>());
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw type_error(key, "a boolean", *v);
            out = v->get<bool>();
        }
    }

    std::optional<std::string> string(const std::string& key) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw type_error(key, "a string", *v);
            return v->get<std::string>();
        }
        return std::nullopt;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items())
            if (!seen_.count(key)) throw ConfigError("unknown key '" + name(key) + "'");
    }

    std::string name(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    std::string label() const { return path_.empty() ? "config" : path_; }

    ConfigError type_error(const std::string& key, const char* want, const json& got) const {
        return ConfigError(name(key) + " must be " + want + ", got " + json_type(got));
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class Int>
std::vector<Int> integer_array(const json& v, const std::string& name) {
    if (!v.is_array()) throw ConfigError(name + " must be an array");
    std::vector<Int> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) throw ConfigError(name + " entries must be integers");
        if (std::is_unsigned_v<Int> && e.get<std::int64_t>() < 0)
            throw ConfigError(name + " entries must be >= 0");
        out.push_back(e.get<Int>());
    }
    return out;
}

void read_shaper(const json& obj, ShaperConfig& sh) {
    Section s(obj, "shaper");
    if (auto v = s.string("variant")) sh.variant = variant_from_string(*v);
    s.number("alpha", sh.alpha);
    s.integer("target_length", sh.target_length);
    s.number("rho", sh.rho);
    s.number("delta", sh.delta);
    if (auto v = s.string("l1max_sign")) sh.l1max_sign = l1max_sign_from_string(*v);
    s.boolean("exclude_invalid_from_exploration", sh.exclude_invalid_from_exploration);
    if (const json* la = s.find("adaptive_lengths")) {
        Section lengths(*la, "shaper.adaptive_lengths");
        std::map<DifficultyLevel, TokenCount> m;
        for (DifficultyLevel level : kAllLevels) {
            if (const json* v = lengths.find(to_string(level))) {
                if (!v->is_number_integer())
                    throw ConfigError(lengths.name(to_string(level)) + " must be an integer");
                m[level] = v->get<TokenCount>();
            }
        }
        lengths.finish();
        sh.adaptive_lengths = std::move(m);
    }
    s.finish();
}

void read_adapt(const json& obj, SearchConfig& a) {
    Section s(obj, "adapt");
    s.integer("lower_bound", a.lower_bound);
    s.integer("context_window", a.context_window);
    s.integer("interval", a.interval);
    s.integer("period", a.period);
    if (auto v = s.string("coverage")) {
        if (*v == "pooled")
            a.coverage = CoverageMode::Pooled;
        else if (*v == "per_question")
            a.coverage = CoverageMode::PerQuestion;
        else
            throw ConfigError("unknown adapt.coverage '" + *v + "'");
    }
    s.finish();
}

void read_sim(const json& obj, SimConfig& sim) {
    Section s(obj, "sim");
    if (const json* classes = s.find("classes")) {
        if (!classes->is_array()) throw ConfigError("sim.classes must be an array");
        sim.classes.clear();
        for (std::size_t i = 0; i < classes->size(); ++i) {
            Section c((*classes)[i], "sim.classes[" + std::to_string(i) + "]");
            QuestionClass qc;
            if (auto v = c.string("name")) qc.name = *v;
            c.number("p_max", qc.p_max);
            c.number("tau", qc.tau);
            c.integer("count", qc.count);
            c.number("initial_length", qc.initial_length);
            c.finish();
            sim.classes.push_back(qc);
        }
    }
    s.integer("k", sim.k);
    s.integer("batch", sim.batch);
    s.integer("steps", sim.steps);
    s.number("sigma", sim.sigma);
    s.number("learning_rate", sim.learning_rate);
    s.number("format_valid_prob", sim.format_valid_prob);
    if (const json* v = s.find("think_prune_stages"))
        sim.think_prune_stages = integer_array<TokenCount>(*v, "sim.think_prune_stages");
    s.finish();
}

const char* to_string(CoverageMode m) {
    return m == CoverageMode::Pooled ? "pooled" : "per_question";
}

}  // namespace

const char* to_string(OutputFormat f) noexcept { return f == OutputFormat::Csv ? "csv" : "jsonl"; }

OutputFormat output_format_from_string(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "jsonl") return OutputFormat::Jsonl;
    throw ConfigError("unknown output format '" + name + "' (expected csv or jsonl)");
}

void RunConfig::validate() const {
    shaper.validate();
    adapt.validate();
    if (monitoring_size < 1) throw ConfigError("monitoring.size must be >= 1");
    for (std::size_t b : budgets)
        if (b == 0) throw ConfigError("analyze.budgets entries must be > 0");
}

SimConfig RunConfig::sim_config() const {
    SimConfig cfg = sim;
    cfg.shaper = shaper;
    cfg.adapt = adapt;
    cfg.seed = seed;
    cfg.monitoring_size = monitoring_size;
    return cfg;
}

ordered_json RunConfig::echo() const {
    ordered_json sh;
    sh["variant"] = to_string(shaper.variant);
    sh["alpha"] = shaper.alpha;
    sh["target_length"] = shaper.target_length;
    sh["rho"] = shaper.rho;
    sh["delta"] = shaper.delta;
    sh["l1max_sign"] = to_string(shaper.l1max_sign);
    sh["exclude_invalid_from_exploration"] = shaper.exclude_invalid_from_exploration;
    if (shaper.adaptive_lengths) {
        ordered_json la = ordered_json::object();
        for (DifficultyLevel level : kAllLevels)
            if (auto it = shaper.adaptive_lengths->find(level); it != shaper.adaptive_lengths->end())
                la[to_string(level)] = it->second;
        sh["adaptive_lengths"] = la;
    }

    ordered_json ad;
    ad["lower_bound"] = adapt.lower_bound;
    ad["context_window"] = adapt.context_window;
    ad["interval"] = adapt.interval;
    ad["period"] = adapt.period;
    ad["coverage"] = to_string(adapt.coverage);

    ordered_json classes = ordered_json::array();
    for (const auto& c : sim.classes) {
        ordered_json qc;
        qc["name"] = c.name;
        qc["p_max"] = c.p_max;
        qc["tau"] = c.tau;
        qc["count"] = c.count;
        qc["initial_length"] = c.initial_length;
        classes.push_back(qc);
    }
    ordered_json si;
    si["classes"] = classes;
    si["k"] = sim.k;
    si["batch"] = sim.batch;
    si["steps"] = sim.steps;
    si["sigma"] = sim.sigma;
    si["learning_rate"] = sim.learning_rate;
    si["format_valid_prob"] = sim.format_valid_prob;
    si["think_prune_stages"] = sim.think_prune_stages;

    ordered_json out;
    out["seed"] = seed;
    out["format"] = to_string(format);
    out["shaper"] = sh;
    out["adapt"] = ad;
    out["monitoring"] = {{"size", monitoring_size}};
    out["sim"] = si;
    out["analyze"] = {{"budgets", budgets}};
    return out;
}

std::string RunConfig::header_line() const { return "# " + echo().dump(); }

RunConfig parse_run_config(const json& doc) {
    RunConfig cfg;
    cfg.budgets.assign(kBudgetSweep.begin(), kBudgetSweep.end());
    cfg.sim.classes = {{"easy", 0.95, 300, 100, 8000},
                       {"medium", 0.8, 1500, 100, 8000},
                       {"hard", 0.5, 6000, 100, 8000}};
    Section top(doc, "");
    top.integer("seed", cfg.seed);
    if (auto v = top.string("format")) cfg.format = output_format_from_string(*v);
    if (const json* v = top.find("shaper")) read_shaper(*v, cfg.shaper);
    if (const json* v = top.find("adapt")) {
        read_adapt(*v, cfg.adapt);
        cfg.has_adapt = true;
    }
    if (const json* v = top.find("monitoring")) {
        Section m(*v, "monitoring");
        m.integer("size", cfg.monitoring_size);
        m.finish();
    }
    if (const json* v = top.find("sim")) read_sim(*v, cfg.sim);
    if (const json* v = top.find("analyze")) {
        Section a(*v, "analyze");
        if (const json* b = a.find("budgets"))
            cfg.budgets = integer_array<std::size_t>(*b, "analyze.budgets");
        a.finish();
    }
    if (const json* v = top.find("io")) {
        Section io(*v, "io");
        cfg.io.input = io.string("input");
        cfg.io.out = io.string("out");
        cfg.io.rollouts = io.string("rollouts");
        io.finish();
    }
    top.finish();
    cfg.validate();
    return cfg;
}

RunConfig parse_run_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config_text(ss.str());
}

}  // namespace laserkit
