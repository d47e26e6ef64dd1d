#include <doctest.h>

#include <chrono>
#include <random>
#include <sstream>

#include "laserkit/adaptive.hpp"
#include "laserkit/difficulty.hpp"

using namespace laserkit;

namespace {

constexpr auto kEasy = DifficultyLevel::Easy;
constexpr auto kMedium = DifficultyLevel::Medium;
constexpr auto kHard = DifficultyLevel::Hard;

/// A k-response sample whose first `num_correct` responses are correct.
MonitoringSample sample(std::vector<TokenCount> lengths, std::size_t num_correct) {
    MonitoringSample s{"m", {}};
    for (std::size_t i = 0; i < lengths.size(); ++i)
        s.responses.push_back({lengths[i], i < num_correct, true, std::nullopt});
    return s;
}

SearchConfig config(TokenCount lower, TokenCount interval) {
    SearchConfig cfg;
    cfg.lower_bound = lower;
    cfg.interval = interval;
    return cfg;
}

std::vector<MonitoringSample> random_set(std::mt19937_64& rng, std::size_t k) {
    std::uniform_int_distribution<std::size_t> n_samples(0, 40), n_correct(0, k);
    std::uniform_int_distribution<int> shape(0, 2);
    std::vector<MonitoringSample> out(n_samples(rng));
    for (auto& s : out) {
        std::vector<TokenCount> lengths;
        const int kind = shape(rng);
        for (std::size_t i = 0; i < k; ++i) {
            TokenCount len;
            if (kind == 0) len = std::uniform_int_distribution<TokenCount>(1, 20000)(rng);
            else if (kind == 1) len = std::uniform_int_distribution<TokenCount>(200, 3000)(rng);
            else len = std::uniform_int_distribution<TokenCount>(1, 8)(rng) * 1024;
            lengths.push_back(len);
        }
        s = sample(lengths, n_correct(rng));
    }
    return out;
}

/// Exhaustive reference: walk the grid with plain counting and integer ECR.
TokenCount brute_force(const std::vector<MonitoringSample>& samples, DifficultyLevel level,
                       const SearchConfig& cfg, std::size_t k) {
    std::vector<TokenCount> grid;
    for (TokenCount l = cfg.lower_bound; l < cfg.context_window; l += cfg.interval)
        grid.push_back(l);
    grid.push_back(cfg.context_window);

    std::size_t c_d = 0;
    for (std::size_t c = 0; c <= k; ++c)
        if (classify(c, k) == level) {
            c_d = std::max<std::size_t>(c, 1);
            break;
        }
    TokenCount best = cfg.context_window;
    bool found = false;
    for (TokenCount l : grid) {
        std::size_t fit = 0, total = 0;
        for (const auto& s : samples) {
            if (classify(s.num_correct(), s.size()) != level) continue;
            for (const auto& r : s.responses) {
                ++total;
                fit += r.length <= l ? 1 : 0;
            }
        }
        if (total > 0 && fit * c_d >= total && (!found || l < best)) {
            best = l;
            found = true;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("search grid") {
    const auto g = config(1024, 512).grid();
    CHECK(g.front() == 1024);
    CHECK(g[1] == 1536);
    CHECK(g.back() == 16384);
    CHECK(g.size() == 31);
    SearchConfig odd = config(1000, 5000);
    CHECK(odd.grid() == std::vector<TokenCount>{1000, 6000, 11000, 16000, 16384});
}

TEST_CASE("search config validation") {
    CHECK_NOTHROW(SearchConfig{}.validate());
    CHECK_THROWS_AS(config(20000, 512).validate(), ConfigError);
    CHECK_THROWS_AS(config(1024, 0).validate(), ConfigError);
    SearchConfig bad;
    bad.period = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("coverage ratio") {
    const std::vector<MonitoringSample> hard{sample({1000, 3000, 5000, 7000}, 0)};
    CHECK(coverage_ratio(hard, kHard, 5000) == 0.75);
    CHECK(coverage_ratio(hard, kHard, 20000) == 1.0);
    CHECK(coverage_ratio(hard, kEasy, 5000) == 0.0);
    CHECK(coverage_ratio({}, kMedium, 5000) == 0.0);
}

TEST_CASE("per-question coverage averages question fractions") {
    const std::vector<MonitoringSample> s{sample({100, 100, 100, 100, 9000, 9000, 9000, 9000}, 0),
                                          sample({100, 9000}, 0)};
    // Pooled: 5 of 10 fit. Per question: (0.5 + 0.5) / 2.
    CHECK(coverage_ratio(s, kHard, 1000) == 0.5);
    CHECK(coverage_ratio(s, kHard, 1000, CoverageMode::PerQuestion) == 0.5);
    const std::vector<MonitoringSample> t{sample({100, 100, 100, 9000}, 0), sample({9000, 9000}, 0)};
    CHECK(coverage_ratio(t, kHard, 1000) == 0.5);
    CHECK(coverage_ratio(t, kHard, 1000, CoverageMode::PerQuestion) == 0.375);
}

TEST_CASE("expected correct responses") {
    CHECK(expected_correct(0.2, kEasy, 8) == doctest::Approx(1.2));
    CHECK(expected_correct(0.1, kEasy, 8) == doctest::Approx(0.6));
    CHECK(expected_correct(1.0, kHard, 8) == 1.0);
    CHECK(expected_correct(0.5, kMedium, 8) == 1.5);
}

TEST_CASE("search examples") {
    SUBCASE("easy level with a fifth of responses under the lower bound") {
        std::vector<MonitoringSample> s;
        for (int q = 0; q < 5; ++q) {
            std::vector<TokenCount> lengths(8, 6000);
            if (q < 4) lengths[0] = lengths[1] = 900;  // 8 of 40 fit
            s.push_back(sample(lengths, 7));
        }
        CHECK(coverage_ratio(s, kEasy, 1024) == doctest::Approx(0.2));
        CHECK(search_target_length(s, kEasy, config(1024, 512), 8) == 1024);
    }
    SUBCASE("hard level needs full coverage") {
        const std::vector<MonitoringSample> s{sample({500, 900}, 0)};
        CHECK(search_target_length(s, kHard, config(1024, 512), 8) == 1024);
        const std::vector<MonitoringSample> t{sample({500, 1100}, 0)};
        CHECK(search_target_length(t, kHard, config(1024, 512), 8) == 1536);
    }
    SUBCASE("no qualifying length falls back to the context window") {
        const std::vector<MonitoringSample> s{sample({500, 30000}, 0)};
        CHECK(search_target_length(s, kHard, config(1024, 512), 8) == 16384);
        CHECK(search_target_length({}, kEasy, config(1024, 512), 8) == 16384);
    }
}

TEST_CASE("search equals the exhaustive arg-min on random monitoring sets") {
    std::mt19937_64 rng(2024);
    const TokenCount intervals[] = {256, 512, 1024};
    std::uniform_int_distribution<TokenCount> lower(1, 16);
    std::size_t trials = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto samples = random_set(rng, 8);
        const SearchConfig cfg = config(lower(rng) * 256, intervals[t % 3]);
        for (DifficultyLevel level : kAllLevels) {
            CHECK(search_target_length(samples, level, cfg, 8) ==
                  brute_force(samples, level, cfg, 8));
        }
        ++trials;
    }
    CHECK(trials == 1000);
}

TEST_CASE("expected correct responses grow with the length") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto samples = random_set(rng, 8);
        for (DifficultyLevel level : kAllLevels) {
            double prev = -1.0;
            for (TokenCount l : config(256, 256).grid()) {
                const double ecr = expected_correct(coverage_ratio(samples, level, l), level, 8);
                CHECK(ecr >= prev);
                prev = ecr;
            }
        }
    }
}

TEST_CASE("maybe_update on and off the period") {
    const SearchConfig cfg = config(1024, 512);
    const std::vector<MonitoringSample> s{
        sample({900, 900, 900, 900, 900, 900, 900, 900}, 8),     // easy
        sample({3000, 3000, 3000, 3000, 9000, 9000, 9000, 9000}, 4),  // medium
        sample({12000, 20000, 20000, 20000, 20000, 20000, 20000, 20000}, 1)};  // hard
    auto state = AdaptiveState::initial(cfg);
    for (DifficultyLevel level : kAllLevels) CHECK(resolve(state, level) == 16384);

    state = maybe_update(state, 0, s, cfg, 8);
    CHECK(state.history.size() == 1);
    state = maybe_update(state, 20, s, cfg, 8);
    CHECK(state.history.size() == 2);
    CHECK(state.history.back().step == 20);
    CHECK(resolve(state, kEasy) == 1024);
    CHECK(resolve(state, kMedium) == 3072);
    CHECK(resolve(state, kHard) == 16384);

    const auto same = maybe_update(state, 21, {}, cfg, 8);
    CHECK(same.targets == state.targets);
    CHECK(same.history == state.history);
    CHECK(same.step_counter == 21);

    const auto cleared = maybe_update(same, 40, {}, cfg, 8);
    for (DifficultyLevel level : kAllLevels) CHECK(resolve(cleared, level) == 16384);
    CHECK_THROWS_AS(maybe_update(cleared, 39, s, cfg, 8), ConfigError);
}

TEST_CASE("targets stay within the search bounds") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 200; ++t) {
        const SearchConfig cfg = config(2048, 512);
        for (TokenCount target : search_all_targets(random_set(rng, 8), cfg, 8)) {
            CHECK(target >= cfg.lower_bound);
            CHECK(target <= cfg.context_window);
        }
    }
}

TEST_CASE("per-question mode agrees with brute force on single-question levels") {
    std::mt19937_64 rng(17);
    SearchConfig cfg = config(512, 512);
    cfg.coverage = CoverageMode::PerQuestion;
    for (int t = 0; t < 200; ++t) {
        auto samples = random_set(rng, 8);
        samples.resize(std::min<std::size_t>(samples.size(), 1));
        SearchConfig pooled = cfg;
        pooled.coverage = CoverageMode::Pooled;
        for (DifficultyLevel level : kAllLevels)
            CHECK(search_target_length(samples, level, cfg, 8) ==
                  search_target_length(samples, level, pooled, 8));
    }
}

TEST_CASE("one update over 500 monitoring questions is cheap") {
    std::mt19937_64 rng(3);
    std::vector<MonitoringSample> s;
    std::uniform_int_distribution<TokenCount> len(100, 16384);
    std::uniform_int_distribution<std::size_t> c(0, 8);
    for (int q = 0; q < 500; ++q) {
        std::vector<TokenCount> lengths;
        for (int i = 0; i < 8; ++i) lengths.push_back(len(rng));
        s.push_back(sample(lengths, c(rng)));
    }
    const auto start = std::chrono::steady_clock::now();
    auto state = AdaptiveState::initial(SearchConfig{});
    for (int rep = 0; rep < 10; ++rep) state = maybe_update(state, rep * 20, s, SearchConfig{}, 8);
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    CHECK(state.history.size() == 10);
    CHECK(ms.count() < 500.0);
}

TEST_CASE("history writers") {
    const std::vector<TargetSnapshot> h{{0, {16384, 3584, 1536}}, {20, {16384, 3072, 1024}}};
    std::ostringstream csv, jsonl;
    write_history_csv(csv, h);
    write_history_jsonl(jsonl, h);
    CHECK(csv.str() == "step,la_easy,la_medium,la_hard\n0,1536,3584,16384\n20,1024,3072,16384\n");
    CHECK(jsonl.str() ==
          "{\"step\":0,\"la_easy\":1536,\"la_medium\":3584,\"la_hard\":16384}\n"
          "{\"step\":20,\"la_easy\":1024,\"la_medium\":3072,\"la_hard\":16384}\n");
}
