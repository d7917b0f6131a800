#include <doctest.h>

#include <cmath>
#include <random>

#include "sp/io.hpp"
#include "sp/matcher.hpp"

using namespace sp;

TEST_CASE("p_n for a first hit followed by one gap") {
    CHECK(p_n_step(1.0 / 6, 1, 1.0 / 6) == doctest::Approx(0.0509259).epsilon(1e-6));
    CHECK(p_n_batch({0, 1}, 1.0 / 6) == doctest::Approx(0.0509259).epsilon(1e-6));
    CHECK(p_n_batch({0}, 0.25) == doctest::Approx(0.25));
}

TEST_CASE("p_n falls as hits are added") {
    double p = p_n_batch({0}, 0.2);
    for (int gap : {0, 3, 1, 7}) {
        const double next = p_n_step(p, gap, 0.2);
        CHECK(next < p);
        p = next;
    }
}

TEST_CASE("incremental and batch p_n agree") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> gap(0, 12);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> gaps{0};
        double p = p_n_batch(gaps, 0.1);
        for (int k = 0; k < 20; ++k) {
            gaps.push_back(gap(rng));
            p = p_n_step(p, gaps.back(), 0.1);
        }
        CHECK(std::fabs(p - p_n_batch(gaps, 0.1)) <= 1e-12);
    }
}

TEST_CASE("broadcast finds the full ordered match first") {
    Pattern d = parse_pattern_line("a b c");
    Pattern t = parse_pattern_line("x a y b c z");
    MatchParams params;
    params.alphabet_size = 6;
    MatchResult r = broadcast_match(d, {t}, params);
    REQUIRE_FALSE(r.sequences.empty());
    const auto& best = r.sequences.front();
    REQUIRE(best.hits.size() == 3);
    CHECK(best.hits[0] == Hit{0, 1, 0});
    CHECK(best.hits[1] == Hit{1, 3, 0});
    CHECK(best.hits[2] == Hit{2, 4, 0});
    CHECK(best.p_n() == doctest::Approx(p_n_batch(best.gaps(), params.p1())));
    for (std::size_t i = 1; i < r.sequences.size(); ++i)
        CHECK_FALSE(more_significant(r.sequences[i], r.sequences[i - 1]));
}

TEST_CASE("hits never join two New positions or the same instance") {
    Pattern a = parse_pattern_line("a b");
    auto sa = match_symbols(a);
    MatchParams params;
    CHECK_FALSE(can_hit(sa[0], sa[0], params));
    auto sb = match_symbols(parse_pattern_line("a b"));
    CHECK(can_hit(sa[0], sb[0], params));
    sa[0].new_pos = 0;
    sb[0].new_pos = 3;
    CHECK_FALSE(can_hit(sa[0], sb[0], params));
}

TEST_CASE("id-c-only restricts hits to mixed roles") {
    auto ids = match_symbols(parse_pattern_line("!a"));
    auto cs = match_symbols(parse_pattern_line("a"));
    auto cs2 = match_symbols(parse_pattern_line("a"));
    MatchParams params;
    params.id_c_only = true;
    CHECK(can_hit(ids[0], cs[0], params));
    CHECK_FALSE(can_hit(cs[0], cs2[0], params));
}

TEST_CASE("gap limits") {
    Pattern d = parse_pattern_line("a b");
    Pattern t = parse_pattern_line("a x x x b");
    MatchParams params;
    params.alphabet_size = 3;
    params.max_gap_target = 1;
    for (const auto& s : broadcast_match(d, {t}, params).sequences) CHECK(s.hits.size() == 1);
    params.max_gap_target = 3;
    CHECK(broadcast_match(d, {t}, params).sequences.front().hits.size() == 2);
}

TEST_CASE("capacity bounds the hit tree") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> letter(0, 3);
    std::vector<std::pair<std::string, Role>> a, b;
    for (int i = 0; i < 200; ++i) a.push_back({std::string(1, static_cast<char>('a' + letter(rng))), Role::C});
    for (int i = 0; i < 12; ++i) b.push_back({std::string(1, static_cast<char>('a' + letter(rng))), Role::C});
    MatchParams params;
    params.alphabet_size = 4;
    params.capacity = 60;
    MatchResult r = broadcast_match(make_pattern(a), {make_pattern(b)}, params);
    CHECK(r.purges > 0);
    CHECK(r.nodes <= params.capacity);
    MatchResult again = broadcast_match(make_pattern(a), {make_pattern(b)}, params);
    CHECK(again.sequences.size() == r.sequences.size());
}
