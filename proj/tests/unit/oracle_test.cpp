#include <doctest.h>

#include "sp/io.hpp"
#include "sp/oracle.hpp"
#include "sp/search.hpp"

using namespace sp;

namespace {

OracleResult oracle(const std::string& fresh, const std::string& old, OracleLimits limits = {}) {
    Pattern f = parse_pattern_line(fresh);
    PatternStore o = make_store(parse_patterns_text(old));
    return brute_force_best(f, o, derive_code_table(o, {f}), {}, limits);
}

}  // namespace

TEST_CASE("nothing shared, nothing found") {
    CHECK_FALSE(oracle("a b", "!P x y !#P\n").best);
}

TEST_CASE("identical content is fully matched") {
    OracleResult r = oracle("a b c", "!P a b c !#P\n");
    REQUIRE(r.best);
    CHECK(r.best->new_hits().size() == 3);
    CHECK(validate(*r.best) == Reject::none);
}

TEST_CASE("oracle refuses instances over its limits") {
    OracleLimits tight;
    tight.max_new = 2;
    CHECK_THROWS_AS(oracle("a b c", "!P a b c !#P\n", tight), LimitError);
}

TEST_CASE("random instances respect the limits") {
    std::mt19937_64 rng(4);
    OracleLimits limits;
    for (int i = 0; i < 50; ++i) {
        RandomInstance inst = random_instance(rng, limits);
        CHECK(inst.fresh.size() <= limits.max_new);
        CHECK(inst.old.size() <= limits.max_patterns);
        for (const auto& p : inst.old) CHECK(p.size() <= limits.max_pattern_size);
    }
}

TEST_CASE("engine matches the oracle on small instances") {
    std::mt19937_64 rng(21);
    int agree = 0;
    for (int i = 0; i < 40; ++i) {
        RandomInstance inst = random_instance(rng);
        CodeTable table = derive_code_table(inst.old, {inst.fresh});
        EngineConfig cfg;
        cfg.driving_quota = 50;
        cfg.target_quota = 50;
        auto ranked = run(inst.fresh, inst.old, cfg, table);
        OracleResult best = brute_force_best(inst.fresh, inst.old, table);
        const Alignment* mine = comparable_best(ranked, OracleLimits{}.max_appearances);
        if ((!mine && !best.best) || (mine && best.best && std::abs(mine->cd - best.best->cd) < 1e-9)) ++agree;
    }
    CHECK(agree == 40);
}
