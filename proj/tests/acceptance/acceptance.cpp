#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "grammar_check.hpp"
#include "sp/io.hpp"
#include "sp/learn.hpp"
#include "sp/oracle.hpp"
#include "sp/probability.hpp"
#include "sp/search.hpp"

using namespace sp;

namespace {

const std::string kFixtures = SP_FIXTURE_DIR;

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v, int prec = 6) {
    std::ostringstream o;
    o << std::setprecision(prec) << v;
    return o.str();
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::vector<TokenId> token_ids(const std::string& s) {
    std::vector<TokenId> out;
    for (const auto& t : check::split(s)) out.push_back(intern(t));
    return out;
}

std::vector<Alignment> ranked_for(const PatternStore& old, const Pattern& fresh, const EngineConfig& cfg = {},
                                  CodingOptions coding = {}) {
    CodeTable table = derive_code_table(old, {fresh}, coding);
    return run(fresh, old, cfg, table);
}

bool has_row_starting(const Alignment& a, const std::string& first, const std::string& second) {
    for (std::size_t r = 1; r < a.rows.size(); ++r) {
        const auto& s = a.rows[r]->symbols;
        if (s.size() >= 2 && s[0].token() == first && s[1].token() == second) return true;
    }
    return false;
}

std::size_t fresh_len(const Alignment& a) { return a.new_pattern().size(); }

// Smoke: p_REL, p_ABS and symbol probabilities.
Outcome smoke() {
    Outcome o;
    auto t0 = Clock::now();
    PatternStore old = make_store(load_patterns(fixture("smoke.sp")));
    Pattern fresh = load_patterns(fixture("smoke.new")).at(0);
    auto ranked = ranked_for(old, fresh);
    InferenceReport rep = relative_probabilities(build_reference_set(ranked));
    const double elapsed = seconds_since(t0);

    const std::vector<double> p_rel{0.51020, 0.35714, 0.10204, 0.02551, 0.00510};
    const std::vector<double> p_abs{0.08718, 0.06103, 0.01744, 0.00436};
    o.expect(rep.p_rel.size() == p_rel.size(), "five alignments in the reference set, got " +
                                                   std::to_string(rep.p_rel.size()));
    for (std::size_t i = 0; i < p_rel.size() && i < rep.p_rel.size(); ++i)
        o.expect(close(rep.p_rel[i], p_rel[i], 1e-4), "p_REL[" + std::to_string(i) + "] = " + fmt(rep.p_rel[i]));
    for (std::size_t i = 0; i < p_abs.size() && i < rep.p_abs.size(); ++i)
        o.expect(close(rep.p_abs[i], p_abs[i], 1e-4), "p_ABS[" + std::to_string(i) + "] = " + fmt(rep.p_abs[i]));

    const std::vector<std::pair<std::string, double>> symbols{{"fire", 0.89286},   {"tobacco", 0.51020},
                                                              {"heating", 0.35714}, {"fog", 0.10204},
                                                              {"dangerous", 0.02551}, {"stage", 0.00510}};
    auto symbol_p = [&](const std::string& name) {
        for (const auto& s : rep.symbols)
            if (s.type == intern(name)) return s.p_rel;
        return -1.0;
    };
    for (const auto& [name, want] : symbols)
        o.expect(close(symbol_p(name), want, 1e-4), name + " p_REL = " + fmt(symbol_p(name)));
    o.expect(symbol_p("smoke") == 1.0, "smoke p_REL = " + fmt(symbol_p("smoke"), 17));
    o.expect(elapsed < 1.0, "runtime " + fmt(elapsed, 3) + " s");
    o.note("p_REL[0] " + fmt(rep.p_rel.empty() ? 0 : rep.p_rel[0]) + ", fire " + fmt(symbol_p("fire")) + ", " +
           fmt(elapsed, 3) + " s");
    return o;
}

// Parsing and production with the sentence grammar.
Outcome parse_and_produce() {
    Outcome o;
    auto t0 = Clock::now();
    PatternStore old = make_store(load_patterns(fixture("grammar_2a.sp")));
    Pattern fresh = load_patterns(fixture("sentence_2.new")).at(0);
    auto ranked = ranked_for(old, fresh);
    const std::string code = ranked.empty() ? "" : ranked[0].code_text();
    o.expect(code == "S 0 1 0 1 0 #S", "best code \"" + code + "\"");

    Production prod = produce(old, token_ids("S 0 1 0 1 0 #S"), {});
    std::vector<TokenId> want;
    for (const auto& s : fresh.symbols) want.push_back(s.type);
    o.expect(prod.complete, "production matched the whole code");
    o.expect(prod.words == want, "produced words equal the sentence");
    const double elapsed = seconds_since(t0);
    o.expect(elapsed < 5.0, "runtime " + fmt(elapsed, 3) + " s");
    o.note("code " + code + ", " + fmt(elapsed, 3) + " s");
    return o;
}

// Ambiguity and its resolution by context.
Outcome icecream() {
    Outcome o;
    PatternStore old = make_store(load_patterns(fixture("icecream.sp")));
    auto bare = ranked_for(old, load_patterns(fixture("icecream_1.new")).at(0));
    o.expect(bare.size() >= 3, "at least three alignments");
    if (bare.size() >= 3) {
        const double delta = bare[0].cd - bare[1].cd;
        const double gap = bare[1].cd - bare[2].cd;
        o.expect(delta < gap, "top two within " + fmt(delta, 4) + " of each other, rank 3 is " + fmt(gap, 4) +
                                  " further");
        const int full = static_cast<int>(fresh_len(bare[0]) == bare[0].new_hits().size()) +
                         static_cast<int>(fresh_len(bare[1]) == bare[1].new_hits().size());
        o.expect(full == 2, "both top parses cover the whole of New");
        const bool ice_cream = has_row_starting(bare[0], "N", "0") || has_row_starting(bare[1], "N", "0");
        const bool i_scream = has_row_starting(bare[0], "V", "0") || has_row_starting(bare[1], "V", "0");
        o.expect(ice_cream && i_scream, "the two parses are \"ice cream\" and \"I scream\"");
        o.note("CD " + fmt(bare[0].cd, 5) + " / " + fmt(bare[1].cd, 5) + " / " + fmt(bare[2].cd, 5));
    }
    auto loudly = ranked_for(old, load_patterns(fixture("icecream_2.new")).at(0));
    o.expect(!loudly.empty() && has_row_starting(loudly[0], "S", "0"), "\"l ae w d l i\" selects S 0");
    auto cold = ranked_for(old, load_patterns(fixture("icecream_3.new")).at(0));
    o.expect(!cold.empty() && has_row_starting(cold[0], "S", "1"), "\"i z k o l d\" selects S 1");
    if (!loudly.empty() && !cold.empty()) o.note("codes " + loudly[0].code_text() + " | " + cold[0].code_text());
    return o;
}

Outcome hit_probability() {
    Outcome o;
    const double step = p_n_step(1.0 / 6, 1, 1.0 / 6);
    const double batch = p_n_batch({0, 1}, 1.0 / 6);
    o.expect(close(step, 0.0509259, 1e-6), "p_n_step = " + fmt(step, 9));
    o.expect(close(batch, 0.0509259, 1e-6), "p_n_batch = " + fmt(batch, 9));
    o.note("p_n " + fmt(step, 9));
    return o;
}

// Engine against the exhaustive oracle on random instances.
Outcome oracle_equivalence() {
    Outcome o;
    constexpr int kInstances = 300;
    auto t0 = Clock::now();
    std::mt19937_64 rng(7);
    std::vector<RandomInstance> instances;
    for (int i = 0; i < kInstances; ++i) instances.push_back(random_instance(rng));

    auto agreement = [&](int driving, int target) {
        int agree = 0;
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const auto& inst = instances[i];
            CodeTable table = derive_code_table(inst.old, {inst.fresh});
            EngineConfig cfg;
            cfg.driving_quota = driving;
            cfg.target_quota = target;
            auto ranked = run(inst.fresh, inst.old, cfg, table);
            OracleResult best = brute_force_best(inst.fresh, inst.old, table);
            const Alignment* mine = comparable_best(ranked, OracleLimits{}.max_appearances);
            const bool same = (!mine && !best.best) || (mine && best.best && close(mine->cd, best.best->cd, 1e-9));
            if (same) {
                ++agree;
                continue;
            }
            std::ostringstream log;
            log << "disagreement (quotas " << driving << "/" << target << ") on instance " << i << ": engine "
                << (mine ? mine->cd : 0) << ", oracle " << best.best_cd() << "\n      New: "
                << serialise(inst.fresh, false);
            for (const auto& p : inst.old) log << "\n      Old: " << serialise(p);
            o.note(log.str());
        }
        return agree;
    };
    const int by_default = agreement(EngineConfig{}.driving_quota, EngineConfig{}.target_quota);
    const int wide = agreement(50, 50);
    const double elapsed = seconds_since(t0);
    o.expect(by_default * 100 >= 99 * kInstances, "default quotas agree on " + std::to_string(by_default) + "/" +
                                                       std::to_string(kInstances));
    o.expect(wide == kInstances, "quotas 50 agree on " + std::to_string(wide) + "/" + std::to_string(kInstances));
    o.expect(elapsed < 120.0, "runtime " + fmt(elapsed, 3) + " s");
    o.note(std::to_string(by_default) + "/" + std::to_string(kInstances) + " default, " + std::to_string(wide) + "/" +
           std::to_string(kInstances) + " at quotas 50, " + fmt(elapsed, 3) + " s");
    return o;
}

const std::vector<std::string> kSplitSuffix{"< %1 1 s >",       "< %2 2 j o h n >", "< %2 3 m a r y >",
                                            "< %3 4 r u n >",   "< %3 5 w a l k >",
                                            "< 6 < %2 > < %3 > < %1 > >"};
const std::vector<std::string> kWholeVerbs{"< %1 1 r u n s >", "< %2 2 j o h n >", "< %2 3 m a r y >",
                                           "< %1 4 w a l k s >", "< 5 < %2 > < %1 > >"};

std::string show(const LearnedGrammar& g) {
    std::string s;
    for (const auto& p : g.patterns) s += "      " + serialise(p, false) + "\n";
    return s;
}

Outcome learning_one() {
    Outcome o;
    auto corpus = load_patterns(fixture("learn_1.new"));
    LearnResult full = Learner().learn(corpus);
    o.expect(full.grammars.size() >= 2, "at least two grammars");
    if (full.grammars.size() >= 2) {
        o.expect(check::isomorphic(full.grammars[0].patterns, kSplitSuffix),
                 "best grammar splits the suffix\n" + show(full.grammars[0]));
        o.expect(check::isomorphic(full.grammars[1].patterns, kWholeVerbs),
                 "second grammar keeps whole verbs\n" + show(full.grammars[1]));
        o.note("T " + fmt(full.grammars[0].t) + " and " + fmt(full.grammars[1].t));
    }

    NewStream three(corpus.begin(), corpus.begin() + 3);
    LearnResult part = Learner().learn(three);
    o.expect(!part.grammars.empty() && check::isomorphic(part.grammars[0].patterns, kSplitSuffix),
             "three sentences give the same best grammar");
    if (!part.grammars.empty()) {
        std::set<std::string> want;
        for (const auto& p : corpus) want.insert(serialise(p, false));
        auto got = check::generated(part.grammars[0].patterns);
        o.expect(got == want, "grammar from three sentences generates exactly the four (" +
                                  std::to_string(got.size()) + " generated)");
    }
    return o;
}

Outcome learning_two() {
    Outcome o;
    auto corpus = load_patterns(fixture("learn_2.new"));
    LearnResult res = Learner().learn(corpus);
    if (res.grammars.empty()) {
        o.expect(false, "a grammar is learned");
        return o;
    }
    const auto& best = res.grammars[0];
    const std::vector<std::string> want{"< %1 1 t h a t >", "< %1 2 s o m e >", "< %2 3 b o y >",
                                        "< %2 4 g i r l >", "< %3 5 r u n s >", "< %3 6 w a l k s >",
                                        "< 7 < %1 > < %2 > < %3 > >"};
    o.expect(check::isomorphic(best.patterns, want), "best grammar\n" + show(best));
    o.expect(best.t <= best.t_raw + 1e-9, "cleaned T " + fmt(best.t) + " <= raw T " + fmt(best.t_raw));
    o.expect(best.t < 0.35 * res.o, "T " + fmt(best.t) + " < 0.35 O = " + fmt(0.35 * res.o));
    bool g_flat = res.curve.size() >= 4;
    for (std::size_t i = res.curve.size() >= 4 ? res.curve.size() - 3 : 0; g_flat && i < res.curve.size(); ++i)
        g_flat = close(res.curve[i].g, res.curve[i - 1].g, 1e-9);
    o.expect(g_flat, "G constant over the last four stages");
    o.note("T " + fmt(best.t) + ", raw " + fmt(best.t_raw) + ", O " + fmt(res.o) + ", T/O " + fmt(best.t / res.o, 4));
    return o;
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
        den += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
    }
    return num / den;
}

Pattern random_pattern(std::mt19937_64& rng, int n, int alphabet) {
    std::uniform_int_distribution<int> letter(0, alphabet - 1);
    std::vector<std::pair<std::string, Role>> ts;
    for (int i = 0; i < n; ++i) ts.push_back({"t" + std::to_string(letter(rng)), Role::C});
    return make_pattern(ts);
}

// Capacity is kept above the longest possible hit chain (the fixed dimension)
// so that the tree stays bounded and each hit costs a bounded amount of work.
double match_seconds(int n, int m) {
    constexpr int kAlphabet = 8;
    MatchParams params;
    params.alphabet_size = kAlphabet;
    params.capacity = 100;
    std::vector<std::pair<Pattern, std::vector<Pattern>>> runs;
    for (int seed = 0; seed < 5; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(n) * 7919 + m * 31 + seed);
        Pattern driving = random_pattern(rng, n, kAlphabet);
        runs.push_back({driving, {random_pattern(rng, m, kAlphabet)}});
    }
    double best = 1e9;
    for (int rep = 0; rep < 7; ++rep) {
        const std::clock_t c0 = std::clock();
        for (const auto& [driving, targets] : runs) broadcast_match(driving, targets, params);
        best = std::min(best, static_cast<double>(std::clock() - c0) / CLOCKS_PER_SEC);
    }
    return best;
}

Outcome invariants() {
    Outcome o;
    std::vector<std::pair<std::string, std::string>> cases{{"smoke.sp", "smoke.new"},
                                                           {"icecream.sp", "icecream_1.new"},
                                                           {"icecream.sp", "icecream_2.new"},
                                                           {"icecream.sp", "icecream_3.new"},
                                                           {"grammar_2a.sp", "sentence_2.new"},
                                                           {"alarm.sp", "alarm_1.new"},
                                                           {"alarm.sp", "alarm_2.new"}};
    std::size_t checked = 0;
    for (const auto& [old_file, new_file] : cases) {
        PatternStore old = make_store(load_patterns(fixture(old_file)));
        Pattern fresh = load_patterns(fixture(new_file)).at(0);
        auto ranked = ranked_for(old, fresh);
        for (const auto& a : ranked) {
            Reject r = validate(a);
            ++checked;
            o.expect(r == Reject::none, new_file + ": engine output rejected (" + reject_name(r) + ")");
        }
        InferenceReport rep = relative_probabilities(build_reference_set(ranked));
        double sum = 0;
        for (double p : rep.p_rel) sum += p;
        o.expect(close(sum, 1.0, 1e-9), new_file + ": sum of p_REL = " + fmt(sum, 17));

        PatternStore scaled;
        for (Pattern p : old) {
            p.frequency *= 13;
            scaled.add(p);
        }
        Pattern fresh_scaled = fresh;
        fresh_scaled.frequency *= 13;
        auto ranked_scaled = ranked_for(scaled, fresh_scaled);
        InferenceReport rep_scaled = relative_probabilities(build_reference_set(ranked_scaled));
        bool same_order = ranked.size() == ranked_scaled.size();
        for (std::size_t i = 0; same_order && i < ranked.size(); ++i)
            same_order = ranked[i].code_text() == ranked_scaled[i].code_text();
        o.expect(same_order, new_file + ": ranking changes when frequencies are scaled");
        bool same_p = rep.p_rel.size() == rep_scaled.p_rel.size();
        for (std::size_t i = 0; same_p && i < rep.p_rel.size(); ++i)
            same_p = close(rep.p_rel[i], rep_scaled.p_rel[i], 1e-9);
        o.expect(same_p, new_file + ": p_REL changes when frequencies are scaled");
    }
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
        auto inst = random_instance(rng);
        auto ranked = ranked_for(inst.old, inst.fresh);
        for (const auto& a : ranked) {
            ++checked;
            o.expect(validate(a) == Reject::none, "random instance " + std::to_string(i) + " output rejected");
        }
    }

    std::uniform_int_distribution<int> gap(0, 9), len(1, 30);
    std::uniform_real_distribution<double> p1(0.01, 0.5);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double p = p1(rng);
        std::vector<int> gaps{0};
        double incremental = p_n_batch(gaps, p);
        const int k = len(rng);
        for (int j = 0; j < k; ++j) {
            gaps.push_back(gap(rng));
            incremental = p_n_step(incremental, gaps.back(), p);
        }
        worst = std::max(worst, std::fabs(incremental - p_n_batch(gaps, p)));
    }
    o.expect(worst <= 1e-12, "p_n incremental and batch differ by " + fmt(worst, 3));

    std::vector<double> sizes, by_n, by_m;
    for (int k = 0; k < 5; ++k) {
        const int s = 256 << k;
        sizes.push_back(s);
        by_n.push_back(match_seconds(s, 32));
        by_m.push_back(match_seconds(32, s));
    }
    const double sn = slope(sizes, by_n), sm = slope(sizes, by_m);
    o.expect(std::fabs(sn - 1.0) <= 0.25, "matcher slope in n = " + fmt(sn, 3));
    o.expect(std::fabs(sm - 1.0) <= 0.25, "matcher slope in m = " + fmt(sm, 3));
    o.note(std::to_string(checked) + " alignments validated, p_n max diff " + fmt(worst, 3) + ", slopes " +
           fmt(sn, 3) + " (n) " + fmt(sm, 3) + " (m)");
    return o;
}

Outcome diagnosis() {
    Outcome o;
    for (const std::string script : {"car_answers.new", "car_gap.new"}) {
        spcli::SessionConfig cfg;
        spcli::DiagnoseOptions opt;
        opt.nodes_file = fixture("car_nodes.txt");
        opt.script_file = fixture(script);
        std::istringstream in;
        std::ostringstream out;
        const int rc = spcli::cmd_diagnose(fixture("car.sp"), opt, cfg, in, out);
        o.expect(rc == 0, script + ": exit " + std::to_string(rc));
        o.expect(out.str().find("Conclusion [9]") != std::string::npos, script + ": conclusion\n" + out.str());
    }
    o.note("both scripts conclude at node 9");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"smoke probabilities", smoke},
        {"parse and produce", parse_and_produce},
        {"ambiguity resolved by context", icecream},
        {"hit probability", hit_probability},
        {"engine agrees with exhaustive oracle", oracle_equivalence},
        {"learning four sentences", learning_one},
        {"learning eight sentences", learning_two},
        {"invariants", invariants},
        {"diagnosis reaches node 9", diagnosis},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
                  << "\n";
        for (const auto& n : o.notes) std::cout << "    " << n << "\n";
        std::cout.flush();
        failed += o.pass ? 0 : 1;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
