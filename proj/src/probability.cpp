#include "sp/probability.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace sp {

double absolute_probability(const Alignment& a) { return std::exp2(-a.be); }

namespace {

bool is_subsequence(const Pattern& small, const Pattern& big) {
    std::size_t j = 0;
    for (const auto& s : big.symbols)
        if (j < small.size() && small.symbols[j].type == s.type) ++j;
    return j == small.size();
}

}  // namespace

Alignment remove_redundant_rows(const Alignment& a) {
    const std::size_t n = a.rows.size();
    std::vector<char> removed(n, 0);
    for (std::size_t r = 1; r < n; ++r)
        for (std::size_t o = 1; o < n; ++o) {
            if (o == r || removed[o]) continue;
            if (a.rows[r]->size() <= a.rows[o]->size() && is_subsequence(*a.rows[r], *a.rows[o])) {
                removed[r] = 1;
                break;
            }
        }
    if (std::none_of(removed.begin(), removed.end(), [](char c) { return c; })) return a;
    Alignment out = a;
    std::vector<int> remap(n, -1);
    out.rows.clear();
    for (std::size_t r = 0; r < n; ++r)
        if (!removed[r]) {
            remap[r] = static_cast<int>(out.rows.size());
            out.rows.push_back(a.rows[r]);
        }
    out.columns.clear();
    for (const auto& col : a.columns) {
        Column c;
        bool has_old = false;
        for (const auto& cell : col)
            if (remap[cell.row] >= 0) {
                c.push_back(Cell{remap[cell.row], cell.pos});
                if (cell.row != 0) has_old = true;
            }
        if (has_old) out.columns.push_back(std::move(c));
    }
    out.key = canonical_key(out);
    return out;
}

ReferenceSet build_reference_set(const std::vector<Alignment>& ranked, bool superset) {
    ReferenceSet ref;
    if (ranked.empty()) return ref;
    auto best = std::max_element(ranked.begin(), ranked.end(),
                                 [](const Alignment& x, const Alignment& y) { return better(y, x); });
    ref.reference_symbols = best->new_hits();
    std::set<std::string> seen;
    for (const auto& a : ranked) {
        auto hits = a.new_hits();
        bool ok = superset ? std::includes(hits.begin(), hits.end(), ref.reference_symbols.begin(),
                                           ref.reference_symbols.end())
                           : hits == ref.reference_symbols;
        if (!ok) continue;
        Alignment edited = remove_redundant_rows(a);
        if (!seen.insert(edited.key).second) continue;
        ref.members.push_back(std::move(edited));
    }
    std::sort(ref.members.begin(), ref.members.end(), better);
    for (const auto& m : ref.members) ref.p_a_sum += absolute_probability(m);
    return ref;
}

InferenceReport relative_probabilities(const ReferenceSet& ref) {
    InferenceReport rep;
    std::map<PatternId, PatternProbability> by_pattern;
    std::vector<PatternId> pattern_order;
    std::map<TokenId, double> by_symbol;
    std::vector<TokenId> symbol_order;
    for (const auto& m : ref.members) {
        double pa = absolute_probability(m);
        double pr = ref.p_a_sum > 0 ? pa / ref.p_a_sum : 0;
        rep.p_abs.push_back(pa);
        rep.p_rel.push_back(pr);
        std::set<PatternId> counted;
        std::set<TokenId> types;
        for (std::size_t r = 1; r < m.rows.size(); ++r) {
            const auto& p = m.rows[r];
            for (const auto& s : p->symbols) types.insert(s.type);
            if (!counted.insert(p->id).second) continue;
            auto [it, inserted] = by_pattern.try_emplace(p->id, PatternProbability{p, 0});
            if (inserted) pattern_order.push_back(p->id);
            it->second.p_rel += pr;
        }
        for (TokenId t : types) {
            if (!by_symbol.count(t)) symbol_order.push_back(t);
            by_symbol[t] += pr;
        }
    }
    std::set<TokenId> new_types;
    if (!ref.members.empty())
        for (const auto& s : ref.members.front().rows[0]->symbols) new_types.insert(s.type);
    for (PatternId id : pattern_order) rep.patterns.push_back(by_pattern[id]);
    for (TokenId t : new_types)
        if (!by_symbol.count(t)) symbol_order.push_back(t);
    for (TokenId t : symbol_order) {
        bool in_new = new_types.count(t) > 0;
        rep.symbols.push_back(SymbolProbability{t, in_new ? 1.0 : by_symbol[t], in_new});
    }
    std::stable_sort(rep.patterns.begin(), rep.patterns.end(),
                     [](const auto& a, const auto& b) { return a.p_rel > b.p_rel; });
    std::stable_sort(rep.symbols.begin(), rep.symbols.end(),
                     [](const auto& a, const auto& b) { return a.p_rel > b.p_rel; });
    return rep;
}

}  // namespace sp
