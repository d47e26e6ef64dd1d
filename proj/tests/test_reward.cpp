#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "laserkit/reward.hpp"
#include "laserkit/rollout_io.hpp"
#include "support.hpp"

using namespace laserkit;

namespace {

ResponseRecord correct(TokenCount len) { return {len, true, true, std::nullopt}; }
ResponseRecord wrong(TokenCount len) { return {len, false, true, std::nullopt}; }
ResponseRecord invalid(TokenCount len) { return {len, false, false, std::nullopt}; }

RolloutGroup group_of(std::vector<ResponseRecord> rs) { return {"q", std::move(rs)}; }

void check_decomposition(const RewardBreakdown& b) {
    CHECK(std::abs(b.total - (b.correctness_term + b.control * b.length_term)) <= 1e-12);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}

std::vector<ResponseRecord> random_group(std::mt19937_64& rng, std::size_t k) {
    std::uniform_int_distribution<TokenCount> len(0, 16384);
    std::uniform_int_distribution<int> kind(0, 2);
    std::vector<ResponseRecord> rs;
    for (std::size_t i = 0; i < k; ++i) {
        const int t = kind(rng);
        rs.push_back(t == 0 ? correct(len(rng)) : t == 1 ? wrong(len(rng)) : invalid(len(rng)));
    }
    return rs;
}

}  // namespace

TEST_CASE("correctness reward") {
    CHECK(correctness_reward(true, true) == 1.0);
    CHECK(correctness_reward(false, true) == -0.5);
    CHECK(correctness_reward(false, false) == -1.0);
    CHECK(correctness_reward(invalid(10)) == -1.0);
}

TEST_CASE("truncation gate") {
    CHECK(truncation_gate(correct(3000), 8192, 0.0).total == 1.0);
    CHECK(truncation_gate(correct(9000), 8192, 0.0).total == 0.0);
    CHECK(truncation_gate(wrong(100), 8192, 0.0).total == -0.5);
    CHECK(truncation_gate(correct(8192), 8192, 0.0).total == 1.0);
    const auto b = truncation_gate(wrong(9000), 8192, -0.25);
    CHECK(b.total == -0.25);
    CHECK(b.correctness_term == 0.0);
    CHECK(b.control == 1.0);
    CHECK(b.length_term == b.total);
}

TEST_CASE("overlong correct answers are not treated like wrong ones unless rho says so") {
    const auto r = correct(9000);
    CHECK(truncation_gate(r, 8192, 0.0).total == 0.0);
    CHECK(truncation_gate(r, 8192, 0.0).total != truncation_gate(wrong(100), 8192, 0.0).total);
    CHECK(truncation_gate(r, 8192, -0.5).total == truncation_gate(wrong(100), 8192, 0.0).total);
    // LASER keeps the correctness reward for the same response.
    CHECK(laser(r, 8192, 0.5).total == 1.0);
}

TEST_CASE("laser") {
    CHECK(laser(correct(3000), 4096, 0.5).total == 1.5);
    CHECK(laser(correct(4096), 4096, 0.5).total == 1.5);
    CHECK(laser(correct(4097), 4096, 0.5).total == 1.0);
    CHECK(laser(wrong(100), 4096, 0.5).total == -0.5);
    CHECK(laser(invalid(100), 4096, 0.5).total == -1.0);
}

TEST_CASE("laser_d") {
    CHECK(laser_d(correct(900), 1024, 0.5).total == 1.5);
    CHECK(laser_d(correct(2000), 1024, 0.5).total == 1.0);
    CHECK(laser_d(wrong(2000), 1024, 0.5).total == -0.5);
}

TEST_CASE("laser_de") {
    CHECK(laser_de(correct(900), 1024, 0.5).total == 1.5);
    CHECK(laser_de(wrong(2000), 1024, 0.5).total == 0.0);
    CHECK(laser_de(wrong(900), 1024, 0.5).total == -0.5);
    CHECK(laser_de(wrong(2000), 1024, 0.5).control == 1.0);
    // The bonus goes to any overlong non-correct response unless excluded.
    CHECK(laser_de(invalid(2000), 1024, 0.5).total == -0.5);
    CHECK(laser_de(invalid(2000), 1024, 0.5, true).total == -1.0);
    CHECK(laser_de(wrong(2000), 1024, 0.5, true).total == 0.0);
}

TEST_CASE("group_efficient") {
    SUBCASE("mean response sits at the sigmoid midpoint") {
        const auto g = group_of({correct(1000), correct(2000), correct(3000), wrong(500)});
        const auto out = group_efficient(g, 0.2);
        CHECK(out[1].length_term == doctest::Approx(-0.1).epsilon(1e-15));
        CHECK(out[1].total == doctest::Approx(0.9).epsilon(1e-15));
        CHECK(out[3].total == -0.5);
        CHECK(out[0].total > out[1].total);
        CHECK(out[1].total > out[2].total);
    }
    SUBCASE("equal correct lengths give z = 0") {
        const auto out = group_efficient(group_of({correct(700), correct(700), correct(700)}), 0.2);
        for (const auto& b : out) CHECK(b.total == doctest::Approx(0.9).epsilon(1e-15));
    }
    SUBCASE("a single correct response gives z = 0") {
        const auto out = group_efficient(group_of({correct(5000), wrong(20)}), 0.4);
        CHECK(out[0].total == doctest::Approx(0.8).epsilon(1e-15));
        CHECK(out[1].total == -0.5);
    }
    SUBCASE("no correct responses leaves the outcome reward") {
        const auto out = group_efficient(group_of({wrong(10), invalid(20000), wrong(300)}), 0.4);
        CHECK(out[0].total == -0.5);
        CHECK(out[1].total == -1.0);
        CHECK(out[2].total == -0.5);
        for (const auto& b : out) CHECK(b.length_term == 0.0);
    }
}

TEST_CASE("kimi") {
    const auto out = kimi(group_of({correct(1000), correct(3000), wrong(1000), wrong(3000)}));
    CHECK(out[0].length_term == 0.5);
    CHECK(out[0].total == 1.5);
    CHECK(out[1].total == 0.5);
    CHECK(out[2].total == -0.5);
    CHECK(out[3].total == -1.0);
    for (const auto& b : kimi(group_of({correct(5), wrong(5), invalid(5)})))
        CHECK(b.length_term == 0.0);
}

TEST_CASE("l1_exact") {
    CHECK(l1_exact(correct(4096), 4096, 0.0003).total == 1.0);
    CHECK(l1_exact(correct(5096), 4096, 0.0003).total == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(l1_exact(wrong(3096), 4096, 0.0003).total == doctest::Approx(-0.8).epsilon(1e-12));
}

TEST_CASE("l1_max") {
    CHECK(l1_max(wrong(100), 4096, 0.01, 0.5).total == 0.0);
    CHECK(l1_max(invalid(9000), 4096, 0.01, 0.5).total == 0.0);
    CHECK(l1_max(correct(4096), 4096, 0.01, 0.5).total == 0.5);
    CHECK(l1_max(correct(4296), 4096, 0.01, 0.5).total == 1.0);
    CHECK(l1_max(correct(4296), 4096, 0.01, 0.5, L1MaxSign::BudgetPenalizing).total == 0.0);
    CHECK(l1_max(correct(4046), 4096, 0.01, 0.5, L1MaxSign::BudgetPenalizing).total ==
          doctest::Approx(1.0));
}

TEST_CASE("shape dispatches to the per-record rules") {
    const auto g = group_of({correct(100), wrong(5000), correct(5000)});
    ShaperConfig cfg;
    cfg.variant = Variant::Laser;
    cfg.target_length = 4096;
    const auto out = shape(cfg, g);
    REQUIRE(out.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out[i] == laser(g.responses[i], 4096, 0.5));

    cfg.variant = Variant::VanillaTruncation;
    const auto cut = shape(cfg, g);
    for (std::size_t i = 0; i < 3; ++i) CHECK(cut[i] == truncation_gate(g.responses[i], 4096));
}

TEST_CASE("shape requires a resolved target for adaptive variants") {
    const auto g = group_of({correct(100)});
    for (Variant v : {Variant::ThinkPrune, Variant::LaserD, Variant::LaserDE}) {
        ShaperConfig cfg;
        cfg.variant = v;
        CHECK_THROWS_AS(shape(cfg, g), ConfigError);
        CHECK_NOTHROW(shape(cfg, g, TokenCount{2048}));
    }
}

TEST_CASE("shaper config validation") {
    ShaperConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.alpha = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.alpha = 0.5;
    cfg.target_length = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("canonical groups match the hand-computed oracle") {
    std::map<std::string, RolloutGroup> groups;
    const auto parsed = parse_log_text(testing::read_fixture("reward_groups.jsonl"));
    REQUIRE(parsed.ok());
    for (auto& lg : group_records(parsed.records)) groups[lg.group.question_id] = lg.group;
    REQUIRE(groups.size() == 8);
    for (const auto& [id, g] : groups) CHECK(g.size() == 8);

    std::istringstream in(testing::read_fixture("reward_oracle.csv"));
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::vector<RewardBreakdown>> cache;
    std::set<Variant> seen;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto c = split_csv(line);
        REQUIRE(c.size() == 14);
        ShaperConfig cfg;
        cfg.variant = variant_from_string(c[1]);
        cfg.alpha = std::stod(c[2]);
        const TokenCount target = std::stoll(c[3]);
        if (target > 0) cfg.target_length = target;
        cfg.rho = std::stod(c[4]);
        cfg.delta = std::stod(c[5]);
        cfg.l1max_sign = l1max_sign_from_string(c[6]);
        cfg.exclude_invalid_from_exploration = c[7] == "1";
        const std::string key = c[0] + "/" + c[8];
        if (!cache.count(key)) {
            std::optional<TokenCount> resolved;
            if (needs_resolved_target(cfg.variant)) resolved = target;
            cache[key] = shape(cfg, groups.at(c[8]), resolved);
        }
        const auto& b = cache[key].at(std::stoul(c[9]));
        INFO(line);
        CHECK(std::abs(b.correctness_term - std::stod(c[10])) <= 1e-9);
        CHECK(std::abs(b.control - std::stod(c[11])) <= 1e-9);
        CHECK(std::abs(b.length_term - std::stod(c[12])) <= 1e-9);
        CHECK(std::abs(b.total - std::stod(c[13])) <= 1e-9);
        check_decomposition(b);
        seen.insert(cfg.variant);
        ++rows;
    }
    CHECK(rows == 768);
    CHECK(seen.size() == std::size(kAllVariants));
}

TEST_CASE("every variant decomposes as C + lambda * S") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const auto g = group_of(random_group(rng, 8));
        for (Variant v : kAllVariants) {
            ShaperConfig cfg;
            cfg.variant = v;
            cfg.alpha = v == Variant::L1Exact ? 0.0003 : v == Variant::L1Max ? 0.01 : 0.5;
            for (const auto& b : shape(cfg, g, TokenCount{3000})) check_decomposition(b);
        }
    }
}

TEST_CASE("laser family steps by exactly alpha at the target") {
    const auto step = [](double alpha) { return doctest::Approx(alpha).epsilon(1e-12); };
    for (double alpha : {0.1, 0.5, 1.25}) {
        for (TokenCount t : {1, 1024, 4096}) {
            CHECK(laser(correct(t), t, alpha).total - laser(correct(t + 1), t, alpha).total ==
                  step(alpha));
            CHECK(laser_d(correct(t), t, alpha).total - laser_d(correct(t + 1), t, alpha).total ==
                  step(alpha));
            CHECK(laser_de(correct(t), t, alpha).total - laser_de(correct(t + 1), t, alpha).total ==
                  step(alpha));
            CHECK(laser_de(wrong(t + 1), t, alpha).total - laser_de(wrong(t), t, alpha).total ==
                  step(alpha));
        }
    }
    // Away from the boundary the reward is flat in length.
    for (TokenCount len = 0; len < 8000; len += 97) {
        const auto a = laser(correct(len), 4096, 0.5).total;
        const auto b = laser(correct(len + 1), 4096, 0.5).total;
        if (len != 4096) CHECK(a == b);
        CHECK(a >= b);
    }
}

TEST_CASE("group_efficient is permutation equivariant and shift invariant") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        auto rs = random_group(rng, 8);
        const auto base = group_efficient(group_of(rs), 0.4);

        std::vector<std::size_t> perm(rs.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<ResponseRecord> permuted;
        for (std::size_t i : perm) permuted.push_back(rs[i]);
        const auto out = group_efficient(group_of(permuted), 0.4);
        for (std::size_t i = 0; i < perm.size(); ++i)
            CHECK(out[i].total == doctest::Approx(base[perm[i]].total).epsilon(1e-12));

        auto shifted = rs;
        for (auto& r : shifted) r.length += 1000;
        const auto moved = group_efficient(group_of(shifted), 0.4);
        for (std::size_t i = 0; i < rs.size(); ++i)
            CHECK(moved[i].length_term == doctest::Approx(base[i].length_term).epsilon(1e-9));
    }
}

TEST_CASE("kimi is invariant to affine rescaling of lengths") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto rs = random_group(rng, 8);
        const auto base = kimi(group_of(rs));
        auto scaled = rs;
        for (auto& r : scaled) r.length = 3 * r.length + 17;
        const auto out = kimi(group_of(scaled));
        for (std::size_t i = 0; i < rs.size(); ++i)
            CHECK(out[i].length_term == doctest::Approx(base[i].length_term).epsilon(1e-12));
    }
}

TEST_CASE("l1 shapes") {
    for (TokenCount d = 0; d < 4000; d += 37) {
        CHECK(l1_exact(correct(4096 + d), 4096, 0.0003).length_term ==
              l1_exact(correct(4096 - d), 4096, 0.0003).length_term);
    }
    for (TokenCount len = 0; len < 10000; len += 13) {
        for (auto sign : {L1MaxSign::AsPrinted, L1MaxSign::BudgetPenalizing}) {
            const auto b = l1_max(correct(len), 4096, 0.01, 0.5, sign);
            CHECK(b.length_term >= 0.0);
            CHECK(b.length_term <= 1.0);
        }
    }
}
