#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "sp/probability.hpp"

using namespace sp;

TEST_CASE("smoke: relative probabilities follow pattern frequencies") {
    auto ranked = fx::ranked(fx::old("smoke.sp"), fx::fresh("smoke.new"));
    ReferenceSet ref = build_reference_set(ranked);
    InferenceReport rep = relative_probabilities(ref);
    REQUIRE(rep.p_rel.size() == 5);
    // relative probabilities are the frequency shares of the five smoke patterns
    const double total = 10000 + 7000 + 2000 + 500 + 100;
    const std::vector<double> shares{10000 / total, 7000 / total, 2000 / total, 500 / total, 100 / total};
    for (std::size_t i = 0; i < shares.size(); ++i) CHECK(rep.p_rel[i] == doctest::Approx(shares[i]).epsilon(1e-9));
    double sum = 0;
    for (double p : rep.p_rel) sum += p;
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
    CHECK(ref.p_a_sum == doctest::Approx(std::accumulate(rep.p_abs.begin(), rep.p_abs.end(), 0.0)));
}

TEST_CASE("absolute probability is two to the minus code size") {
    auto ranked = fx::ranked(fx::old("smoke.sp"), fx::fresh("smoke.new"));
    REQUIRE_FALSE(ranked.empty());
    CHECK(absolute_probability(ranked.front()) == doctest::Approx(std::exp2(-ranked.front().be)));
}

TEST_CASE("reports are sorted by probability") {
    auto ranked = fx::ranked(fx::old("smoke.sp"), fx::fresh("smoke.new"));
    InferenceReport rep = relative_probabilities(build_reference_set(ranked));
    auto desc = [](const auto& a, const auto& b) { return a.p_rel > b.p_rel; };
    CHECK(std::is_sorted(rep.patterns.begin(), rep.patterns.end(), desc));
    CHECK(std::is_sorted(rep.symbols.begin(), rep.symbols.end(), desc));
}

TEST_CASE("alarm: burglary is more likely than earthquake") {
    auto ranked = fx::ranked(fx::old("alarm.sp"), fx::fresh("alarm_1.new"));
    InferenceReport rep = relative_probabilities(build_reference_set(ranked));
    double burglary = 0, earthquake = 0;
    for (const auto& s : rep.symbols) {
        if (s.type == intern("burglary")) burglary = s.p_rel;
        if (s.type == intern("earthquake")) earthquake = s.p_rel;
    }
    CHECK(burglary > earthquake);
    CHECK(earthquake > 0);
}

TEST_CASE("redundant rows are dropped") {
    auto ranked = fx::ranked(fx::old("icecream.sp"), fx::fresh("icecream_1.new"));
    for (const auto& a : ranked) {
        Alignment r = remove_redundant_rows(a);
        CHECK(r.rows.size() <= a.rows.size());
        CHECK(remove_redundant_rows(r).rows.size() == r.rows.size());
    }
}

TEST_CASE("reference set members encode the same New symbols") {
    auto ranked = fx::ranked(fx::old("icecream.sp"), fx::fresh("icecream_1.new"));
    ReferenceSet ref = build_reference_set(ranked);
    REQUIRE_FALSE(ref.members.empty());
    for (const auto& m : ref.members) CHECK(m.new_hits() == ref.reference_symbols);
}
