#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sp/io.hpp"
#include "sp/probability.hpp"

namespace spcli {

using nlohmann::json;
using namespace sp;

namespace {

CodingOptions coding_for(const SessionConfig& cfg, double default_factor) {
    CodingOptions c = cfg.coding;
    c.cost_factor = cfg.cost_factor.value_or(default_factor);
    return c;
}

std::vector<Pattern> load_new(const std::string& path) {
    auto ps = load_patterns(path);
    if (ps.empty()) throw UsageError(path + " contains no New pattern");
    return ps;
}

std::string pattern_text(const Pattern& p) { return serialise(p, false); }

std::string tokens_text(const std::vector<TokenId>& ts) {
    std::string s;
    for (TokenId t : ts) {
        if (!s.empty()) s += ' ';
        s += token_text(t);
    }
    return s;
}

json alignment_json(const Alignment& a, int rank) {
    json rows = json::array();
    for (std::size_t r = 1; r < a.rows.size(); ++r) rows.push_back(pattern_text(*a.rows[r]));
    json hits = json::array();
    for (int h : a.new_hits()) hits.push_back(h);
    return json{{"rank", rank},     {"cd", a.cd},     {"cr", a.cr},
                {"bn", a.bn},       {"be", a.be},     {"code", a.code_text()},
                {"new_hits", hits}, {"old_rows", rows}, {"rendering", render(a)}};
}

void print_alignment(std::ostream& out, const Alignment& a, int rank) {
    out << "#" << rank << "  CD " << std::fixed << std::setprecision(2) << a.cd << "  CR " << std::setprecision(4)
        << a.cr << "  BN " << std::setprecision(2) << a.bn << "  BE " << a.be << "\n";
    out.unsetf(std::ios::floatfield);
    out << "code: " << a.code_text() << "\n" << render(a) << "\n";
}

std::vector<Alignment> search(const Pattern& fresh, const PatternStore& old, const NewStream& news,
                              const SessionConfig& cfg, CodeTable* table_out = nullptr) {
    CodeTable table = derive_code_table(old, news, coding_for(cfg, 2.0));
    auto ranked = run(fresh, old, cfg.engine, table);
    if (table_out) *table_out = table;
    return ranked;
}

}  // namespace

int cmd_align(const std::string& old_file, const std::string& new_file, const SessionConfig& cfg,
              std::ostream& out) {
    PatternStore old = make_store(load_patterns(old_file));
    NewStream news = load_new(new_file);
    json results = json::array();
    for (const auto& fresh : news) {
        auto ranked = search(fresh, old, news, cfg);
        const int k = std::min<int>(cfg.top_k, static_cast<int>(ranked.size()));
        if (cfg.format == Format::json) {
            json as = json::array();
            for (int i = 0; i < k; ++i) as.push_back(alignment_json(ranked[i], i + 1));
            results.push_back({{"new", pattern_text(fresh)}, {"count", ranked.size()}, {"alignments", as}});
            continue;
        }
        out << "New: " << pattern_text(fresh) << "\n";
        out << ranked.size() << " alignment(s)\n\n";
        for (int i = 0; i < k; ++i) print_alignment(out, ranked[i], i + 1);
    }
    if (cfg.format == Format::json) out << json{{"command", "align"}, {"results", results}}.dump(2) << "\n";
    return 0;
}

int cmd_probs(const std::string& old_file, const std::string& new_file, const SessionConfig& cfg,
              std::ostream& out) {
    PatternStore old = make_store(load_patterns(old_file));
    NewStream news = load_new(new_file);
    json results = json::array();
    for (const auto& fresh : news) {
        auto ranked = search(fresh, old, news, cfg);
        ReferenceSet ref = build_reference_set(ranked);
        InferenceReport rep = relative_probabilities(ref);
        if (cfg.format == Format::json) {
            json as = json::array(), ps = json::array(), ss = json::array();
            for (std::size_t i = 0; i < ref.members.size(); ++i)
                as.push_back({{"rank", i + 1},
                              {"code", ref.members[i].code_text()},
                              {"cd", ref.members[i].cd},
                              {"p_abs", rep.p_abs[i]},
                              {"p_rel", rep.p_rel[i]}});
            for (const auto& p : rep.patterns) ps.push_back({{"pattern", pattern_text(*p.pattern)}, {"p_rel", p.p_rel}});
            for (const auto& s : rep.symbols)
                ss.push_back({{"symbol", token_text(s.type)}, {"p_rel", s.p_rel}, {"in_new", s.in_new}});
            results.push_back({{"new", pattern_text(fresh)},
                               {"p_a_sum", ref.p_a_sum},
                               {"alignments", as},
                               {"patterns", ps},
                               {"symbols", ss}});
            continue;
        }
        out << "New: " << pattern_text(fresh) << "\n\n";
        out << "alignments (reference set, sum of p_ABS = " << ref.p_a_sum << ")\n";
        out << std::left << std::setw(6) << "rank" << std::setw(12) << "p_ABS" << std::setw(12) << "p_REL" << "code\n";
        for (std::size_t i = 0; i < ref.members.size(); ++i)
            out << std::setw(6) << i + 1 << std::setw(12) << std::setprecision(5) << rep.p_abs[i] << std::setw(12)
                << rep.p_rel[i] << ref.members[i].code_text() << "\n";
        out << "\npatterns\n";
        for (const auto& p : rep.patterns)
            out << std::setw(12) << std::setprecision(5) << p.p_rel << pattern_text(*p.pattern) << "\n";
        out << "\nsymbols\n";
        for (const auto& s : rep.symbols)
            out << std::setw(12) << std::setprecision(5) << s.p_rel << token_text(s.type) << (s.in_new ? "  (New)" : "")
                << "\n";
        out << std::right << "\n";
    }
    if (cfg.format == Format::json) out << json{{"command", "probs"}, {"results", results}}.dump(2) << "\n";
    return 0;
}

int cmd_produce(const std::string& old_file, const std::string& code, const SessionConfig& cfg,
                std::ostream& out, std::ostream& err) {
    PatternStore old = make_store(load_patterns(old_file));
    std::vector<TokenId> tokens;
    std::istringstream is(code);
    for (std::string t; is >> t;) tokens.push_back(intern(t[0] == '!' && t.size() > 1 ? t.substr(1) : t));
    if (tokens.empty()) throw UsageError("empty code");
    Production p = produce(old, tokens, cfg.engine, coding_for(cfg, 2.0));
    if (p.words.empty()) err << "warning: the code matched nothing in Old; empty production\n";
    else if (!p.complete) err << "warning: not every code symbol was matched\n";
    if (cfg.format == Format::json) {
        json words = json::array();
        for (TokenId t : p.words) words.push_back(token_text(t));
        json j{{"command", "produce"}, {"code", tokens_text(tokens)}, {"words", words}, {"complete", p.complete}};
        if (p.alignment) j["alignment"] = alignment_json(*p.alignment, 1);
        out << j.dump(2) << "\n";
        return 0;
    }
    out << tokens_text(p.words) << "\n";
    return 0;
}

int cmd_learn(const std::string& corpus_file, const std::string& out_dir, const SessionConfig& cfg,
              std::ostream& out) {
    NewStream corpus = load_patterns(corpus_file);
    if (corpus.empty()) throw UsageError(corpus_file + " contains no New pattern");
    LearnConfig lc;
    lc.cost_factor = cfg.cost_factor.value_or(10.0);
    lc.provisional_bits = cfg.provisional_bits;
    lc.derive_top = cfg.derive_top;
    lc.prune_width = cfg.prune_width;
    lc.engine = cfg.engine;
    Learner learner(lc);
    LearnResult res = learner.learn(corpus);
    const int k = std::min<int>(cfg.top_k, static_cast<int>(res.grammars.size()));

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (int i = 0; i < k; ++i) {
            std::ofstream f(std::filesystem::path(out_dir) / ("grammar_" + std::to_string(i + 1) + ".sp"));
            f << serialise(res.grammars[i].patterns, true);
        }
        std::ofstream c(std::filesystem::path(out_dir) / "curve.csv");
        c << "stage,g,e,t,o\n";
        for (std::size_t i = 0; i < res.curve.size(); ++i)
            c << i + 1 << "," << res.curve[i].g << "," << res.curve[i].e << "," << res.curve[i].t << ","
              << res.curve[i].o << "\n";
    }

    if (cfg.format == Format::json) {
        json gs = json::array(), curve = json::array();
        for (int i = 0; i < k; ++i) {
            const auto& g = res.grammars[i];
            json ps = json::array();
            for (const auto& p : g.patterns) ps.push_back(serialise(p, true));
            gs.push_back({{"rank", i + 1}, {"t", g.t}, {"t_raw", g.t_raw}, {"g", g.g}, {"e", g.e}, {"patterns", ps}});
        }
        for (std::size_t i = 0; i < res.curve.size(); ++i)
            curve.push_back({{"stage", i + 1}, {"g", res.curve[i].g}, {"e", res.curve[i].e}, {"t", res.curve[i].t},
                             {"o", res.curve[i].o}});
        out << json{{"command", "learn"}, {"o", res.o}, {"old_size", res.old_size}, {"grammars", gs}, {"curve", curve}}
                   .dump(2)
            << "\n";
        return 0;
    }
    out << "New patterns: " << corpus.size() << "  Old patterns created: " << res.old_size << "  O = " << res.o
        << " bits\n\n";
    for (int i = 0; i < k; ++i) {
        const auto& g = res.grammars[i];
        out << "grammar " << i + 1 << ": T = " << g.t << " (before clean-up " << g.t_raw << ")  G = " << g.g
            << "  E = " << g.e << "\n";
        for (const auto& p : g.patterns) out << "  " << serialise(p, true) << "\n";
        out << "\n";
    }
    out << "stage        G          E          T          O\n";
    for (std::size_t i = 0; i < res.curve.size(); ++i)
        out << std::setw(5) << i + 1 << std::fixed << std::setprecision(1) << std::setw(11) << res.curve[i].g
            << std::setw(11) << res.curve[i].e << std::setw(11) << res.curve[i].t << std::setw(11) << res.curve[i].o
            << "\n";
    out.unsetf(std::ios::floatfield);
    return 0;
}

namespace {

std::map<std::string, std::string> load_nodes(const std::string& path) {
    std::map<std::string, std::string> nodes;
    if (path.empty()) return nodes;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    for (std::string line; std::getline(in, line);) {
        std::istringstream is(line);
        std::string id;
        if (!(is >> id) || id[0] == '#') continue;
        std::string text;
        std::getline(is >> std::ws, text);
        nodes[id] = text;
    }
    return nodes;
}

std::string current_node(const Alignment& a) {
    const Column& last = a.columns.back();
    return a.symbol(last.front()).token();
}

int unmatched_old(const Alignment& a) {
    int n = 0;
    for (const auto& col : a.columns)
        if (col.size() == 1 && col.front().row != 0 && !a.symbol(col.front()).is_id()) ++n;
    return n;
}

// Most New symbols encoded, then fewest unmatched Old C-symbols, then CD.
const Alignment* best_path(const std::vector<Alignment>& ranked) {
    const Alignment* best = nullptr;
    for (const auto& a : ranked) {
        if (!best) {
            best = &a;
            continue;
        }
        auto ha = a.new_hits().size(), hb = best->new_hits().size();
        if (ha != hb) {
            if (ha > hb) best = &a;
            continue;
        }
        int ua = unmatched_old(a), ub = unmatched_old(*best);
        if (ua != ub) {
            if (ua < ub) best = &a;
            continue;
        }
        if (better(a, *best)) best = &a;
    }
    return best;
}

bool has_successor(const PatternStore& old, const std::string& node) {
    for (const auto& p : old)
        if (p.size() > 1 && p.symbols.front().token() == node) return true;
    return false;
}

}  // namespace

int cmd_diagnose(const std::string& old_file, const DiagnoseOptions& opt, const SessionConfig& cfg,
                 std::istream& in, std::ostream& out) {
    PatternStore old = make_store(load_patterns(old_file));
    auto nodes = load_nodes(opt.nodes_file);
    std::vector<std::string> script;
    const bool scripted = !opt.script_file.empty();
    if (scripted)
        for (const auto& p : load_patterns(opt.script_file))
            for (const auto& s : p.symbols) script.push_back(s.token());
    std::size_t next = 0;
    std::vector<std::string> answers{opt.start};
    if (!script.empty() && script.front() == opt.start) next = 1;

    auto next_answer = [&](std::string& a) -> bool {
        if (scripted) {
            if (next >= script.size()) return false;
            a = script[next++];
            return true;
        }
        for (std::string line; std::getline(in, line);) {
            std::istringstream is(line);
            if (is >> a) return true;
        }
        return false;
    };
    auto describe = [&](const std::string& node) {
        auto it = nodes.find(node);
        return it == nodes.end() ? "node " + node : it->second;
    };

    EngineConfig ecfg = cfg.engine;
    ecfg.window_size = 1;
    json transcript = json::array();
    auto finish = [&](const Alignment& best, const std::vector<Alignment>& ranked, bool terminal) {
        std::string node = current_node(best);
        std::vector<Alignment> ordered{best};
        for (const auto& a : ranked)
            if (a.key != best.key) ordered.push_back(a);
        ReferenceSet ref = build_reference_set(ordered);
        InferenceReport rep = relative_probabilities(ref);
        double p = rep.p_rel.empty() ? 0 : rep.p_rel.front();
        if (cfg.format == Format::json) {
            out << json{{"command", "diagnose"},
                        {"transcript", transcript},
                        {"terminal", terminal},
                        {"node", node},
                        {"text", describe(node)},
                        {"probability", p},
                        {"alignment", alignment_json(best, 1)}}
                       .dump(2)
                << "\n";
        } else {
            out << (terminal ? "Conclusion" : "Best partial inference") << " [" << node << "]: " << describe(node)
                << "\n";
            out << "relative probability " << std::setprecision(4) << p << "\n";
        }
        return terminal ? 0 : 3;
    };

    for (;;) {
        std::vector<std::pair<std::string, Role>> tokens;
        for (const auto& a : answers) tokens.emplace_back(a, Role::C);
        Pattern fresh = make_pattern(tokens);
        NewStream news{fresh};
        CodeTable table = derive_code_table(old, news, coding_for(cfg, 2.0));
        auto ranked = run_windowed(fresh, old, ecfg, table, nullptr);
        const Alignment* best = best_path(ranked);
        if (!best) {
            if (cfg.format == Format::text) out << "No alignment for \"" << tokens_text(c_content(fresh)) << "\"\n";
            return 3;
        }
        std::string node = current_node(*best);
        if (!has_successor(old, node)) return finish(*best, ranked, true);
        if (cfg.format == Format::text) out << "[" << node << "] " << describe(node) << " " << std::flush;
        std::string answer;
        if (!next_answer(answer)) {
            if (cfg.format == Format::text) out << "\n";
            if (answers.size() == 1) {
                if (cfg.format == Format::text) out << "No answers given.\n";
                else out << json{{"command", "diagnose"}, {"transcript", transcript}, {"terminal", false}}.dump(2) << "\n";
                return 0;
            }
            return finish(*best, ranked, false);
        }
        if (cfg.format == Format::text) out << (scripted ? answer + "\n" : "");
        transcript.push_back({{"node", node}, {"question", describe(node)}, {"answer", answer}});
        answers.push_back(answer);
    }
}

int cmd_oracle(const std::string& old_file, const std::string& new_file, const OracleOptions& opt,
               const SessionConfig& cfg, std::ostream& out) {
    auto compare = [&](const Pattern& fresh, const PatternStore& old, json& row) {
        NewStream news{fresh};
        CodeTable table = derive_code_table(old, news, coding_for(cfg, 2.0));
        OracleResult o = brute_force_best(fresh, old, table, cfg.engine.legality, opt.limits);
        row["legal"] = o.legal;
        row["oracle_cd"] = o.best ? json(o.best->cd) : json(nullptr);
        if (o.best) row["oracle_rendering"] = render(*o.best);
        if (!opt.compare && opt.random == 0) return true;
        auto ranked = run(fresh, old, cfg.engine, table);
        const Alignment* e = comparable_best(ranked, opt.limits.max_appearances);
        row["engine_cd"] = e ? json(e->cd) : json(nullptr);
        bool agree = (!e && !o.best) || (e && o.best && std::fabs(e->cd - o.best->cd) <= 1e-9);
        row["agree"] = agree;
        return agree;
    };

    if (opt.random > 0) {
        std::mt19937_64 rng(cfg.seed);
        int agree = 0;
        json disagreements = json::array();
        for (int i = 0; i < opt.random; ++i) {
            RandomInstance inst = random_instance(rng, opt.limits);
            json row;
            if (compare(inst.fresh, inst.old, row)) {
                ++agree;
                continue;
            }
            row["new"] = pattern_text(inst.fresh);
            json ps = json::array();
            for (const auto& p : inst.old) ps.push_back(serialise(p, true));
            row["old"] = ps;
            disagreements.push_back(row);
        }
        if (cfg.format == Format::json) {
            out << json{{"command", "oracle"}, {"instances", opt.random}, {"agree", agree}, {"seed", cfg.seed},
                        {"disagreements", disagreements}}
                       .dump(2)
                << "\n";
        } else {
            out << agree << " of " << opt.random << " random instances agree (seed " << cfg.seed << ")\n";
            for (const auto& d : disagreements)
                out << "  New \"" << d["new"].get<std::string>() << "\": engine " << d["engine_cd"] << ", oracle "
                    << d["oracle_cd"] << "\n";
        }
        return 0;
    }

    if (old_file.empty() || new_file.empty()) throw UsageError("oracle needs OLD and NEW files, or --random N");
    PatternStore old = make_store(load_patterns(old_file));
    NewStream news = load_new(new_file);
    json row;
    compare(news.front(), old, row);
    if (cfg.format == Format::json) {
        row["command"] = "oracle";
        out << row.dump(2) << "\n";
        return 0;
    }
    out << row["legal"] << " legal alignment(s)\n";
    if (row["oracle_cd"].is_null()) {
        out << "no alignment\n";
    } else {
        out << "best CD " << row["oracle_cd"].get<double>() << "\n" << row["oracle_rendering"].get<std::string>() << "\n";
    }
    if (row.contains("engine_cd"))
        out << "engine CD " << row["engine_cd"] << (row["agree"].get<bool>() ? "  (agrees)" : "  (differs)") << "\n";
    return 0;
}

}  // namespace spcli
