#include <doctest.h>

#include <cmath>

#include "sp/coding.hpp"
#include "sp/io.hpp"

using namespace sp;

namespace {

std::vector<Pattern> smoke_store() {
    return parse_patterns_text(
        "!clouds black rain (15000)\n!dangerous fire smoke (500)\n!heating fire smoke (7000)\n"
        "!tobacco fire smoke (10000)\n!fog smoke (2000)\n!stage smoke (100)\n"
        "!thunder lightning (5000)\n!strawberries cream (1500)\n");
}

CodeTable table_of(const std::vector<Pattern>& ps, CodingOptions opt = {}) {
    std::vector<const Pattern*> ptrs;
    for (const auto& p : ps) ptrs.push_back(&p);
    return derive_code_table(ptrs, opt);
}

}  // namespace

TEST_CASE("symbol frequencies sum pattern frequencies") {
    auto ps = smoke_store();
    CodeTable t = table_of(ps);
    double total = 0;
    for (const auto& p : ps) total += static_cast<double>(p.frequency * p.size());
    CHECK(t.total_mass == doctest::Approx(total));
    CHECK(t.total_mass == doctest::Approx(114700));
    CHECK(t.entry(intern("fire"))->mass == doctest::Approx(500 + 7000 + 10000));
    CHECK(t.bits(intern("tobacco")) == doctest::Approx(-std::log2(10000.0 / 114700.0)));
}

TEST_CASE("code table invariants") {
    CodeTable t = table_of(smoke_store());
    double p_sum = 0, h = 0;
    for (const auto& [type, e] : t.entries) {
        p_sum += e.probability;
        h += e.probability * t.bits(type);
    }
    CHECK(p_sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.entropy() == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("single type alphabet costs nothing") {
    CodeTable t = table_of({parse_pattern_line("a")});
    CHECK(t.bits(intern("a")) == 0.0);
}

TEST_CASE("doubling every frequency changes nothing") {
    auto ps = smoke_store();
    CodeTable a = table_of(ps);
    for (auto& p : ps) p.frequency *= 2;
    CodeTable b = table_of(ps);
    for (const auto& [type, e] : a.entries) CHECK(b.bits(type) == doctest::Approx(e.bits).epsilon(1e-12));
}

TEST_CASE("cost factor inflates New sizes") {
    CodeTable t = table_of(smoke_store(), {3.0, false});
    const TokenId fog = intern("fog");
    CHECK(t.new_bits(fog) == doctest::Approx(3.0 * t.bits(fog)));
    CHECK_THROWS_AS(table_of(smoke_store(), {0.5, false}), ValidationError);
}

TEST_CASE("shannon-fano-elias sizes") {
    CHECK(ideal_bits(0.25) == doctest::Approx(2.0));
    CHECK(sfe_bits(0.25) == doctest::Approx(3.0));
    CHECK(sfe_bits(0.3) == doctest::Approx(3.0));
    CodeTable t = table_of(smoke_store(), {2.0, true});
    CHECK(t.bits(intern("smoke")) == std::ceil(t.bits(intern("smoke"))));
}

TEST_CASE("redundancy estimate") {
    CHECK(redundancy_estimate({{1, 100}}) == 0);
    CHECK(redundancy_estimate({{3, 8}}) == 16);
    CHECK(redundancy_estimate({{2, 10}, {5, 3}}) == 22);
}

TEST_CASE("search space") {
    SearchSpace s3 = search_space_stats(3);
    CHECK(static_cast<double>(s3.subsequences) == 7);
    CHECK(static_cast<double>(s3.comparisons) == 21);
    SearchSpace s100 = search_space_stats(100);
    CHECK(static_cast<double>(s100.subsequences) == doctest::Approx(1.2676506e30));
    CHECK(s100.log10_comparisons == doctest::Approx(std::log10(8.034e59)).epsilon(1e-4));
}
