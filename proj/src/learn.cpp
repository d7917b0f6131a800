#include "sp/learn.hpp"

#include "sp/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace sp {

namespace {

constexpr std::size_t kParseCap = 4096;

const TokenId kOpen = intern("<");
const TokenId kClose = intern(">");

Symbol id_symbol(TokenId t) { return Symbol{t, Role::ID, fresh_instance()}; }
Symbol c_symbol(TokenId t) { return Symbol{t, Role::C, fresh_instance()}; }

bool is_reference(const std::vector<TokenId>& content, const std::set<TokenId>& classes) {
    return content.size() == 3 && content[0] == kOpen && content[2] == kClose &&
           classes.count(content[1]) > 0;
}

int hit_runs(const Alignment& a) {
    int runs = 0, prev = -2;
    for (int h : a.new_hits()) {
        if (h != prev + 1) ++runs;
        prev = h;
    }
    return runs;
}

}  // namespace

std::vector<TokenId> c_content(const Pattern& p) {
    std::vector<TokenId> out;
    for (const auto& s : p.symbols)
        if (!s.is_id()) out.push_back(s.type);
    return out;
}

Learner::Learner(LearnConfig cfg) : cfg_(std::move(cfg)) {}

void Learner::set_corpus(const NewStream& corpus) {
    corpus_ = corpus;
    for (const auto& p : corpus)
        for (const auto& s : p.symbols) reserved_.insert(s.type);
}

TokenId Learner::fresh_class() {
    for (;;) {
        TokenId t = intern("%" + std::to_string(next_class_++));
        if (!reserved_.count(t) && !classes_.count(t)) {
            classes_.insert(t);
            return t;
        }
    }
}

TokenId Learner::fresh_discriminator() {
    for (;;) {
        TokenId t = intern(std::to_string(next_disc_++));
        if (!reserved_.count(t)) return t;
    }
}

Pattern Learner::make_member(TokenId cls, const std::vector<TokenId>& content) {
    Pattern p;
    p.id = fresh_pattern_id();
    p.symbols.push_back(id_symbol(kOpen));
    p.symbols.push_back(id_symbol(cls));
    p.symbols.push_back(id_symbol(fresh_discriminator()));
    for (TokenId t : content) p.symbols.push_back(c_symbol(t));
    p.symbols.push_back(id_symbol(kClose));
    return p;
}

const Pattern& Learner::ingest(const Pattern& fresh) {
    Pattern copy = make_member(fresh_class(), {});
    copy.symbols.pop_back();
    copy.copy_of = fresh.id;
    copy.copy_offset = static_cast<int>(copy.symbols.size());
    for (const auto& s : fresh.symbols) copy.symbols.push_back(c_symbol(s.type));
    copy.symbols.push_back(id_symbol(kClose));
    return old_.add(std::move(copy));
}

const Pattern* Learner::find_duplicate(const std::vector<TokenId>& content) const {
    for (const auto& p : old_)
        if (c_content(p) == content) return &p;
    return nullptr;
}

void Learner::add_class(PatternId id, TokenId cls) {
    Pattern* p = old_.find_mut(id);
    if (!p) return;
    std::size_t at = 1;
    while (at < p->size() && p->symbols[at].is_id() && classes_.count(p->symbols[at].type)) {
        if (p->symbols[at].type == cls) return;
        ++at;
    }
    p->symbols.insert(p->symbols.begin() + static_cast<std::ptrdiff_t>(at), id_symbol(cls));
    if (p->copy_of) ++p->copy_offset;
}

TokenId Learner::single_member_class(const std::vector<TokenId>& content) {
    if (is_reference(content, classes_)) return content[1];
    if (const Pattern* dup = find_duplicate(content)) {
        if (dup->size() > 1 && classes_.count(dup->symbols[1].type)) return dup->symbols[1].type;
    }
    TokenId cls = fresh_class();
    join_class(cls, content);
    return cls;
}

void Learner::join_class(TokenId cls, const std::vector<TokenId>& content) {
    if (content.empty()) return;
    if (const Pattern* dup = find_duplicate(content)) {
        add_class(dup->id, cls);
        return;
    }
    old_.add(make_member(cls, content));
}

std::vector<PatternId> Learner::derive_patterns(const Alignment& a) {
    bool applicable = false;
    return derive_patterns(a, applicable);
}

std::vector<PatternId> Learner::derive_patterns(const Alignment& a, bool& applicable) {
    applicable = false;
    const int r = most_abstract_row(a);
    if (r < 1) return {};
    const Pattern& row = *a.rows[r];
    const std::size_t nrows = a.rows.size();

    std::vector<std::vector<int>> col_of(nrows);
    for (std::size_t i = 0; i < nrows; ++i) col_of[i].assign(a.rows[i]->size(), -1);
    std::vector<int> new_at(a.columns.size(), -1);
    for (std::size_t c = 0; c < a.columns.size(); ++c)
        for (const auto& cell : a.columns[c]) {
            col_of[cell.row][cell.pos] = static_cast<int>(c);
            if (cell.row == 0) new_at[c] = cell.pos;
        }
    auto matched = [&](int rr, int pos) { return a.columns[col_of[rr][pos]].size() > 1; };

    for (std::size_t rr = 1; rr < nrows; ++rr) {
        if (static_cast<int>(rr) == r) continue;
        for (std::size_t pos = 0; pos < a.rows[rr]->size(); ++pos)
            if (!a.rows[rr]->symbols[pos].is_id() && !matched(static_cast<int>(rr), static_cast<int>(pos)))
                return {};
    }

    struct Unit {
        int first = 0;
        int last = 0;
        bool matched = false;
        int lo = -1;
        int hi = -1;
    };
    std::vector<Unit> units;
    for (int pos = 0; pos < static_cast<int>(row.size()); ++pos) {
        const Symbol& s = row.symbols[pos];
        if (s.is_id()) continue;
        Unit u{pos, pos};
        if (s.type == kOpen) {
            int depth = 0;
            for (int q = pos; q < static_cast<int>(row.size()); ++q) {
                const Symbol& t = row.symbols[q];
                if (t.is_id()) continue;
                if (t.type == kOpen) ++depth;
                if (t.type == kClose && --depth == 0) {
                    u.last = q;
                    break;
                }
            }
        }
        int hits = 0, total = 0;
        for (int q = u.first; q <= u.last; ++q) {
            if (row.symbols[q].is_id()) continue;
            ++total;
            if (matched(r, q)) ++hits;
        }
        if (hits != 0 && hits != total) return {};
        u.matched = hits > 0;
        if (u.matched)
            for (int c = col_of[r][u.first]; c <= col_of[r][u.last]; ++c)
                if (new_at[c] >= 0) {
                    if (u.lo < 0) u.lo = new_at[c];
                    u.hi = new_at[c];
                }
        units.push_back(u);
        pos = u.last;
    }

    std::vector<char> new_hit(a.rows[0]->size(), 0);
    for (int h : a.new_hits()) new_hit[h] = 1;
    bool any_unmatched = std::count(new_hit.begin(), new_hit.end(), 0) > 0;
    for (const auto& u : units) any_unmatched = any_unmatched || !u.matched;
    if (!any_unmatched) return {};
    applicable = true;

    struct Segment {
        bool matched = false;
        std::vector<TokenId> old_part;
        std::vector<TokenId> new_part;
    };
    std::vector<Segment> segments;
    auto open_segment = [&](bool m) -> Segment& {
        if (segments.empty() || segments.back().matched != m) segments.push_back(Segment{m, {}, {}});
        return segments.back();
    };
    int next_new = 0;
    auto flush_new = [&](int upto) {
        for (; next_new < upto; ++next_new)
            if (!new_hit[next_new]) open_segment(false).new_part.push_back(a.rows[0]->symbols[next_new].type);
    };
    for (const auto& u : units) {
        if (u.matched && u.lo >= 0) flush_new(u.lo);
        Segment& seg = open_segment(u.matched);
        for (int q = u.first; q <= u.last; ++q)
            if (!row.symbols[q].is_id()) seg.old_part.push_back(row.symbols[q].type);
        if (u.matched && u.hi >= 0) next_new = std::max(next_new, u.hi + 1);
    }
    flush_new(static_cast<int>(a.rows[0]->size()));

    const std::size_t before = old_.size();
    std::vector<TokenId> refs;
    for (const auto& seg : segments) {
        TokenId cls;
        if (seg.matched) {
            cls = single_member_class(seg.old_part);
        } else if (is_reference(seg.old_part, classes_)) {
            cls = seg.old_part[1];
            join_class(cls, seg.new_part);
        } else if (seg.old_part.empty() || seg.new_part.empty()) {
            cls = single_member_class(seg.old_part.empty() ? seg.new_part : seg.old_part);
        } else {
            cls = fresh_class();
            join_class(cls, seg.old_part);
            join_class(cls, seg.new_part);
        }
        refs.insert(refs.end(), {kOpen, cls, kClose});
    }
    if (!find_duplicate(refs)) old_.add(make_member(fresh_class(), refs));

    std::vector<PatternId> added;
    for (std::size_t i = before; i < old_.size(); ++i) added.push_back(old_.patterns()[i].id);
    return added;
}


namespace {

struct Parse {
    const Pattern* pattern = nullptr;
    std::vector<std::shared_ptr<const Parse>> children;
};
using ParsePtr = std::shared_ptr<const Parse>;
using Partial = std::vector<std::pair<int, ParsePtr>>;

class FullParser {
public:
    FullParser(const Pattern& fresh, const PatternStore& old, const std::set<TokenId>& classes,
               std::size_t cap)
        : fresh_(fresh), classes_(classes), cap_(cap) {
        for (const auto& p : old) {
            for (std::size_t i = 1; i < p.size() && p.symbols[i].is_id(); ++i)
                if (classes.count(p.symbols[i].type)) members_[p.symbols[i].type].push_back(&p);
            patterns_.push_back(&p);
        }
    }

    std::vector<ParsePtr> complete() {
        std::vector<ParsePtr> out;
        const int n = static_cast<int>(fresh_.size());
        for (const Pattern* p : patterns_)
            for (const auto& [end, tree] : from(p, 0))
                if (end == n && out.size() < cap_) out.push_back(tree);
        return out;
    }

private:
    const Partial& from(const Pattern* p, int start) {
        auto key = std::make_pair(p->id, start);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        memo_[key];
        Partial out;
        std::vector<ParsePtr> kids;
        walk(*p, 0, start, kids, out);
        return memo_[key] = std::move(out);
    }

    void walk(const Pattern& p, std::size_t i, int pos, std::vector<ParsePtr>& kids, Partial& out) {
        if (out.size() >= cap_) return;
        while (i < p.size() && p.symbols[i].is_id()) ++i;
        if (i >= p.size()) {
            auto tree = std::make_shared<Parse>();
            tree->pattern = &p;
            tree->children = kids;
            out.emplace_back(pos, std::move(tree));
            return;
        }
        if (p.symbols[i].type == kOpen && i + 2 < p.size() && !p.symbols[i + 1].is_id() &&
            classes_.count(p.symbols[i + 1].type) && p.symbols[i + 2].type == kClose) {
            auto m = members_.find(p.symbols[i + 1].type);
            if (m == members_.end()) return;
            for (const Pattern* member : m->second) {
                Partial sub = from(member, pos);
                for (const auto& [end, tree] : sub) {
                    if (end == pos) continue;
                    kids.push_back(tree);
                    walk(p, i + 3, end, kids, out);
                    kids.pop_back();
                }
            }
            return;
        }
        if (pos < static_cast<int>(fresh_.size()) && fresh_.symbols[pos].type == p.symbols[i].type)
            walk(p, i + 1, pos + 1, kids, out);
    }

    const Pattern& fresh_;
    const std::set<TokenId>& classes_;
    std::size_t cap_;
    std::vector<const Pattern*> patterns_;
    std::map<TokenId, std::vector<const Pattern*>> members_;
    std::map<std::pair<PatternId, int>, Partial> memo_;
};

struct Layout {
    Alignment a;
    int next_new = 0;

    void emit(const Parse& node, const Cell* open, const Cell* cls, const Cell* close) {
        const int row = static_cast<int>(a.rows.size());
        const Pattern& p = *node.pattern;
        a.rows.push_back(std::make_shared<const Pattern>(p));
        auto column = [&](Cell own, const Cell* parent) {
            Column c;
            if (parent) c.push_back(*parent);
            c.push_back(own);
            if (c.front().row > c.back().row) std::swap(c.front(), c.back());
            a.columns.push_back(std::move(c));
        };
        bool class_done = cls == nullptr;
        std::size_t child = 0;
        const std::size_t last = p.size() - 1;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Symbol& s = p.symbols[i];
            Cell own{row, static_cast<int>(i)};
            if (s.is_id()) {
                if (i == 0) column(own, open);
                else if (i == last) column(own, close);
                else if (!class_done && s.type == a.symbol(*cls).type) {
                    column(own, cls);
                    class_done = true;
                } else {
                    column(own, nullptr);
                }
                continue;
            }
            bool ref = s.type == kOpen && i + 2 < p.size() && !p.symbols[i + 1].is_id() &&
                       p.symbols[i + 2].type == kClose && child < node.children.size();
            if (ref && node.children[child]->pattern) {
                Cell o{row, static_cast<int>(i)}, k{row, static_cast<int>(i + 1)}, c{row, static_cast<int>(i + 2)};
                emit(*node.children[child++], &o, &k, &c);
                i += 2;
                continue;
            }
            column(own, nullptr);
            a.columns.back().insert(a.columns.back().begin(), Cell{0, next_new++});
        }
    }
};

}  // namespace

std::vector<Alignment> full_alignments(const Pattern& fresh, const PatternStore& old,
                                       const std::set<TokenId>& classes, const CodeTable& table,
                                       std::size_t cap) {
    FullParser parser(fresh, old, classes, cap);
    auto fresh_ptr = std::make_shared<const Pattern>(fresh);
    std::vector<Alignment> out;
    for (const auto& tree : parser.complete()) {
        Layout l;
        l.a.rows.push_back(fresh_ptr);
        l.emit(*tree, nullptr, nullptr, nullptr);
        finalise(l.a, table);
        out.push_back(std::move(l.a));
    }
    std::sort(out.begin(), out.end(), better);
    return out;
}

CodeTable Learner::search_table() const {
    CodingOptions opt;
    opt.cost_factor = cfg_.cost_factor;
    CodeTable table = derive_code_table(PatternStore{}, corpus_, opt);
    table.provisional_bits = cfg_.provisional_bits;
    return table;
}

EngineConfig Learner::engine_config(bool mirror) const {
    EngineConfig e = cfg_.engine;
    e.legality.brackets = true;
    e.legality.mirror = mirror;
    e.match.mirror = mirror;
    return e;
}

void Learner::process(const Pattern& fresh) {
    ingest(fresh);
    CodeTable table = search_table();
    SearchStats st;
    auto ranked = run(fresh, old_, engine_config(true), table, &st);
    std::stable_sort(ranked.begin(), ranked.end(), [](const Alignment& x, const Alignment& y) {
        if (std::fabs(x.cd - y.cd) > 1e-9) return x.cd > y.cd;
        return hit_runs(x) < hit_runs(y);
    });
    int used = 0;
    for (const auto& a : ranked) {
        if (used >= cfg_.derive_top) break;
        bool applicable = false;
        derive_patterns(a, applicable);
        if (applicable) ++used;
    }
}

SiftResult Learner::sift_and_sort(const NewStream& corpus) {
    SiftResult out;
    for (auto& p : old_.patterns()) p.frequency = 0;
    CodeTable table = search_table();
    for (const auto& p : corpus)
        for (const auto& s : p.symbols) out.data_types.insert(s.type);

    for (const auto& fresh : corpus) {
        auto ranked = full_alignments(fresh, old_, classes_, table, kParseCap);
        std::vector<FullAlignment> full;
        for (const auto& a : ranked) {
            if (static_cast<int>(full.size()) >= cfg_.full_per_new) break;
            if (a.new_hits().size() != fresh.size()) continue;
            bool complete = true;
            for (const auto& col : a.columns)
                if (col.size() == 1 && !a.symbol(col[0]).is_id()) complete = false;
            if (!complete) continue;
            FullAlignment f;
            f.alignment = a;
            for (std::size_t r = 1; r < a.rows.size(); ++r) ++f.counts[a.rows[r]->id];
            for (const auto& [id, n] : f.counts) f.patterns.push_back(id);
            for (const auto& col : a.columns)
                if (col.size() == 1 && a.symbol(col[0]).is_id())
                    f.code.emplace_back(a.rows[col[0].row]->id, col[0].pos);
            full.push_back(std::move(f));
        }
        if (full.empty()) throw std::logic_error("no full alignment for a New pattern");

        std::map<PatternId, int> pmax;
        std::map<TokenId, int> smax;
        for (const auto& f : full) {
            std::map<TokenId, int> sc;
            for (std::size_t r = 1; r < f.alignment.rows.size(); ++r)
                for (const auto& s : f.alignment.rows[r]->symbols) ++sc[s.type];
            for (const auto& [id, n] : f.counts) pmax[id] = std::max(pmax[id], n);
            for (const auto& [t, n] : sc) smax[t] = std::max(smax[t], n);
        }
        for (const auto& [id, n] : pmax) out.pattern_frequency[id] += n;
        for (const auto& [t, n] : smax) out.symbol_frequency[t] += n;
        out.per_new.push_back(std::move(full));
    }

    double total = 0;
    for (const auto& [t, n] : out.symbol_frequency) total += static_cast<double>(n);
    for (const auto& [t, n] : out.symbol_frequency) {
        double b = -std::log2(static_cast<double>(n) / total);
        out.bits[t] = out.data_types.count(t) ? b * cfg_.cost_factor : b;
    }
    for (auto& p : old_.patterns()) {
        auto it = out.pattern_frequency.find(p.id);
        p.frequency = it == out.pattern_frequency.end() ? 0 : it->second;
    }
    for (auto& list : out.per_new)
        for (auto& f : list) {
            f.e = 0;
            for (const auto& [id, pos] : f.code) f.e += out.bits[old_.find(id)->symbols[pos].type];
        }
    for (const auto& p : corpus)
        for (const auto& s : p.symbols) out.o += out.bits[s.type];
    return out;
}

namespace {

double pattern_bits(const Pattern& p, const std::map<TokenId, double>& bits) {
    double sum = 0;
    for (const auto& s : p.symbols) {
        auto it = bits.find(s.type);
        sum += it == bits.end() ? 0 : it->second;
    }
    return sum;
}

}  // namespace

std::vector<Grammar> Learner::compile_alternative_grammars(const SiftResult& sift,
                                                           std::vector<StagePoint>* curve) const {
    std::unordered_map<PatternId, double> cost;
    for (const auto& p : old_) cost[p.id] = pattern_bits(p, sift.bits);

    std::vector<Grammar> frontier{Grammar{}};
    double o = 0;
    for (std::size_t j = 0; j < sift.per_new.size(); ++j) {
        std::vector<Grammar> next;
        for (const auto& g : frontier)
            for (std::size_t k = 0; k < sift.per_new[j].size(); ++k) {
                const auto& f = sift.per_new[j][k];
                Grammar h = g;
                std::vector<PatternId> merged;
                std::set_union(g.members.begin(), g.members.end(), f.patterns.begin(), f.patterns.end(),
                               std::back_inserter(merged));
                for (PatternId id : merged)
                    if (!std::binary_search(g.members.begin(), g.members.end(), id)) h.g += cost[id];
                h.members = std::move(merged);
                h.e += f.e;
                h.choice.push_back(static_cast<int>(k));
                next.push_back(std::move(h));
            }
        std::stable_sort(next.begin(), next.end(), [](const Grammar& x, const Grammar& y) {
            if (std::fabs(x.t() - y.t()) > 1e-9) return x.t() < y.t();
            return x.members < y.members;
        });
        std::vector<Grammar> kept;
        for (auto& g : next) {
            if (static_cast<int>(kept.size()) >= cfg_.prune_width) break;
            bool dup = std::any_of(kept.begin(), kept.end(),
                                   [&](const Grammar& k) { return k.members == g.members; });
            if (!dup) kept.push_back(std::move(g));
        }
        frontier = std::move(kept);
        for (const auto& p : corpus_.size() > j ? corpus_[j].symbols : std::vector<Symbol>{}) {
            auto it = sift.bits.find(p.type);
            if (it != sift.bits.end()) o += it->second;
        }
        if (curve && !frontier.empty())
            curve->push_back(StagePoint{frontier.front().g, frontier.front().e, frontier.front().t(), o});
    }
    return frontier;
}

LearnedGrammar Learner::cleanup(const Grammar& g, const SiftResult& sift) const {
    std::vector<Pattern> patterns;
    for (PatternId id : g.members) patterns.push_back(*old_.find(id));
    std::sort(patterns.begin(), patterns.end(),
              [](const Pattern& a, const Pattern& b) { return a.id < b.id; });

    std::set<TokenId> referenced;
    for (const auto& p : patterns)
        for (const auto& s : p.symbols)
            if (!s.is_id() && classes_.count(s.type)) referenced.insert(s.type);

    std::set<std::pair<PatternId, int>> removed;
    double removed_g = 0;
    for (const auto& p : patterns)
        for (std::size_t i = 1; i < p.size(); ++i) {
            const Symbol& s = p.symbols[i];
            if (!s.is_id() || !classes_.count(s.type)) break;
            if (referenced.count(s.type)) continue;
            removed.insert({p.id, static_cast<int>(i)});
            removed_g += sift.bits.at(s.type);
        }
    double removed_e = 0;
    for (std::size_t j = 0; j < g.choice.size(); ++j)
        for (const auto& cell : sift.per_new[j][g.choice[j]].code)
            if (removed.count(cell)) removed_e += sift.bits.at(old_.find(cell.first)->symbols[cell.second].type);

    std::map<TokenId, TokenId> class_names;
    std::map<TokenId, TokenId> disc_names;
    LearnedGrammar out;
    for (const auto& p : patterns) {
        Pattern q = p;
        q.symbols.clear();
        q.copy_of = 0;
        q.copy_offset = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (removed.count({p.id, static_cast<int>(i)})) continue;
            Symbol s = p.symbols[i];
            if (classes_.count(s.type)) {
                auto [it, fresh] = class_names.try_emplace(s.type, 0);
                if (fresh) it->second = intern("%" + std::to_string(class_names.size()));
                s.type = it->second;
            } else if (s.is_id() && s.type != kOpen && s.type != kClose) {
                auto [it, fresh] = disc_names.try_emplace(s.type, 0);
                if (fresh) it->second = intern(std::to_string(disc_names.size()));
                s.type = it->second;
            }
            q.symbols.push_back(s);
        }
        out.patterns.push_back(std::move(q));
    }
    out.t_raw = g.t();
    out.g = g.g - removed_g;
    out.e = g.e - removed_e;
    out.t = out.g + out.e;
    return out;
}

LearnResult Learner::learn(const NewStream& corpus) {
    set_corpus(corpus);
    for (const auto& p : corpus) process(p);
    SiftResult sift = sift_and_sort(corpus);
    LearnResult res;
    auto grammars = compile_alternative_grammars(sift, &res.curve);
    if (cfg_.per_grammar_frequencies) {
        for (auto& g : grammars) {
            std::map<TokenId, double> counts;
            double total = 0;
            for (std::size_t j = 0; j < g.choice.size(); ++j) {
                const auto& a = sift.per_new[j][g.choice[j]].alignment;
                for (std::size_t r = 1; r < a.rows.size(); ++r)
                    for (const auto& s : a.rows[r]->symbols) {
                        counts[s.type] += 1;
                        total += 1;
                    }
            }
            std::map<TokenId, double> bits;
            for (const auto& [t, n] : counts) {
                double b = -std::log2(n / total);
                bits[t] = sift.data_types.count(t) ? b * cfg_.cost_factor : b;
            }
            g.g = 0;
            for (PatternId id : g.members) g.g += pattern_bits(*old_.find(id), bits);
            g.e = 0;
            for (std::size_t j = 0; j < g.choice.size(); ++j)
                for (const auto& [id, pos] : sift.per_new[j][g.choice[j]].code)
                    g.e += bits[old_.find(id)->symbols[pos].type];
        }
        std::stable_sort(grammars.begin(), grammars.end(),
                         [](const Grammar& x, const Grammar& y) { return x.t() < y.t(); });
    }
    std::set<std::vector<std::string>> seen;
    for (const auto& g : grammars) {
        LearnedGrammar clean = cleanup(g, sift);
        std::vector<std::string> text;
        for (const auto& p : clean.patterns) text.push_back(serialise(p, true));
        std::sort(text.begin(), text.end());
        if (seen.insert(text).second) res.grammars.push_back(std::move(clean));
    }
    std::stable_sort(res.grammars.begin(), res.grammars.end(),
                     [](const LearnedGrammar& x, const LearnedGrammar& y) { return x.t < y.t; });
    res.o = sift.o;
    res.old_size = old_.size();
    return res;
}

std::vector<const Pattern*> top_patterns(const std::vector<Pattern>& grammar) {
    std::set<TokenId> referenced;
    for (const auto& p : grammar)
        for (const auto& s : p.symbols)
            if (!s.is_id()) referenced.insert(s.type);
    std::vector<const Pattern*> out;
    for (const auto& p : grammar) {
        bool used = false;
        for (std::size_t i = 1; i < p.size() && p.symbols[i].is_id(); ++i)
            if (p.symbols[i].type != kClose && referenced.count(p.symbols[i].type)) used = true;
        if (!used) out.push_back(&p);
    }
    return out;
}

namespace {

void expand(const std::vector<Pattern>& grammar, const Pattern& p, std::size_t from,
            std::vector<TokenId>& prefix, std::set<std::vector<TokenId>>& out, std::size_t cap,
            int depth, const std::function<void(std::vector<TokenId>&)>& done) {
    if (out.size() >= cap || depth > 16) return;
    std::size_t i = from;
    while (i < p.size() && p.symbols[i].is_id()) ++i;
    if (i >= p.size()) {
        done(prefix);
        return;
    }
    const Symbol& s = p.symbols[i];
    if (s.type == kOpen && i + 2 < p.size() && !p.symbols[i + 1].is_id() && p.symbols[i + 2].type == kClose) {
        TokenId cls = p.symbols[i + 1].type;
        for (const auto& m : grammar) {
            bool member = false;
            for (std::size_t k = 1; k < m.size() && m.symbols[k].is_id(); ++k)
                if (m.symbols[k].type == cls) member = true;
            if (!member) continue;
            expand(grammar, m, 0, prefix, out, cap, depth + 1, [&](std::vector<TokenId>& pre) {
                expand(grammar, p, i + 3, pre, out, cap, depth, done);
            });
        }
        return;
    }
    prefix.push_back(s.type);
    expand(grammar, p, i + 1, prefix, out, cap, depth, done);
    prefix.pop_back();
}

}  // namespace

std::set<std::vector<TokenId>> generate(const std::vector<Pattern>& grammar, std::size_t cap) {
    std::set<std::vector<TokenId>> out;
    for (const Pattern* top : top_patterns(grammar)) {
        std::vector<TokenId> prefix;
        expand(grammar, *top, 0, prefix, out, cap, 0, [&](std::vector<TokenId>& s) { out.insert(s); });
    }
    return out;
}

}  // namespace sp
