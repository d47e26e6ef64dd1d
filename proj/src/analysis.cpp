#include "laserkit/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <ostream>

#include "laserkit/format.hpp"
#include "laserkit/reward.hpp"

namespace laserkit {

namespace {

bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool has_alnum(std::string_view s) noexcept {
    return std::any_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string_view::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

}  // namespace

std::size_t KeywordReport::total() const noexcept {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

std::size_t KeywordReport::count(std::string_view keyword) const {
    for (std::size_t i = 0; i < kReflectionKeywords.size(); ++i)
        if (kReflectionKeywords[i] == keyword) return counts[i];
    throw std::out_of_range("not a tracked keyword: " + std::string(keyword));
}

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

std::vector<std::string_view> word_tokens(std::string_view text) {
    auto toks = whitespace_tokens(text);
    std::erase_if(toks, [](std::string_view t) { return !has_alnum(t); });
    return toks;
}

KeywordReport keyword_density(std::string_view text) {
    KeywordReport rep;
    const auto toks = word_tokens(text);
    rep.tokens = toks.size();
    std::string normalized;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) normalized.push_back(' ');
        for (char c : toks[i])
            normalized.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    for (std::size_t i = 0; i < kReflectionKeywords.size(); ++i)
        rep.counts[i] = count_occurrences(normalized, kReflectionKeywords[i]);
    rep.density = static_cast<double>(rep.total()) /
                  static_cast<double>(std::max<std::size_t>(rep.tokens, 1));
    return rep;
}

std::string budget_force(std::span<const std::string> thinking_tokens, bool answer_suffix_present,
                         std::size_t budget) {
    if (budget == 0) throw ConfigError("budget must be > 0");
    std::size_t thinking = thinking_tokens.size();
    if (answer_suffix_present) {
        for (std::size_t i = 0; i < thinking_tokens.size(); ++i)
            if (thinking_tokens[i].find(kThinkClose) != std::string::npos) {
                thinking = i;
                break;
            }
    }
    std::string out;
    const bool force = thinking > budget;
    const std::size_t keep = force ? budget : thinking_tokens.size();
    for (std::size_t i = 0; i < keep; ++i) {
        if (i) out.push_back(' ');
        out += thinking_tokens[i];
    }
    if (force) out += kForcedSuffix;
    return out;
}

std::string budget_force_text(std::string_view text, std::size_t budget) {
    if (budget == 0) throw ConfigError("budget must be > 0");
    const std::string_view thinking = text.substr(0, text.find(kThinkClose));
    const auto toks = whitespace_tokens(thinking);
    if (toks.size() <= budget) return std::string(text);
    const std::string_view& last = toks[budget - 1];
    const auto end = static_cast<std::size_t>(last.data() + last.size() - text.data());
    return std::string(text.substr(0, end)) + std::string(kForcedSuffix);
}

std::size_t thinking_length(std::string_view text) {
    return whitespace_tokens(text.substr(0, text.find(kThinkClose))).size();
}

std::vector<SummaryRow> summarize(std::span<const SummaryInput> inputs) {
    struct Acc {
        std::size_t n = 0;
        double length = 0.0;
        std::size_t correct = 0;
        double reward = 0.0;
        bool any_text = false;
        std::size_t keywords = 0;
        std::size_t tokens = 0;
    };
    std::map<std::int64_t, Acc> by_step;
    for (const auto& in : inputs) {
        Acc& a = by_step[in.step];
        ++a.n;
        a.length += static_cast<double>(in.length);
        a.correct += in.correct ? 1 : 0;
        a.reward += in.total ? *in.total : correctness_reward(in.correct, in.format_valid);
        if (in.text) {
            const KeywordReport rep = keyword_density(*in.text);
            a.any_text = true;
            a.keywords += rep.total();
            a.tokens += rep.tokens;
        }
    }
    std::vector<SummaryRow> rows;
    for (const auto& [step, a] : by_step) {
        const double n = static_cast<double>(a.n);
        SummaryRow row{step, a.n, a.length / n, static_cast<double>(a.correct) / n, a.reward / n,
                       std::nullopt};
        if (a.any_text)
            row.density = static_cast<double>(a.keywords) /
                          static_cast<double>(std::max<std::size_t>(a.tokens, 1));
        rows.push_back(row);
    }
    return rows;
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows) {
    os << "step,responses,mean_length,accuracy,mean_reward,density\n";
    for (const auto& r : rows) {
        os << r.step << ',' << r.responses << ',' << format_double(r.mean_length) << ','
           << format_double(r.accuracy) << ',' << format_double(r.mean_reward) << ',';
        if (r.density) os << format_double(*r.density);
        os << '\n';
    }
}

}  // namespace laserkit
