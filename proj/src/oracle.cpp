#include "sp/oracle.hpp"

#include <algorithm>
#include <map>

namespace sp {

namespace {

struct PairState {
    bool seen = false;
    bool a_since = false;
    bool b_since = false;
};

class Enumerator {
public:
    Enumerator(PatternPtr fresh, std::vector<PatternPtr> rows, std::vector<int> prev_appearance,
               const CodeTable& table, const LegalityOptions& legality, OracleResult& result)
        : table_(table), legality_(legality), result_(result), prev_appearance_(std::move(prev_appearance)) {
        a_.rows.push_back(std::move(fresh));
        for (auto& r : rows) a_.rows.push_back(std::move(r));
        n_ = static_cast<int>(a_.rows.size());
        pos_.assign(n_, 0);
        pairs_.assign(n_ * n_, PairState{});
    }

    void go() { step(0, {}); }

private:
    bool finished(int r) const { return pos_[r] >= static_cast<int>(a_.rows[r]->size()); }

    void step(int new_next, const Column& prev) {
        bool all_done = true;
        for (int r = 1; r < n_; ++r)
            if (!finished(r)) all_done = false;
        if (all_done) {
            record();
            return;
        }
        std::vector<TokenId> tokens;
        for (int r = 1; r < n_; ++r)
            if (!finished(r)) {
                TokenId t = a_.rows[r]->symbols[pos_[r]].type;
                if (std::find(tokens.begin(), tokens.end(), t) == tokens.end()) tokens.push_back(t);
            }
        for (TokenId t : tokens) {
            std::vector<int> cands;
            for (int r = 1; r < n_; ++r)
                if (!finished(r) && a_.rows[r]->symbols[pos_[r]].type == t) {
                    if (pos_[r] == 0 && prev_appearance_[r] > 0 && pos_[prev_appearance_[r]] == 0) continue;
                    cands.push_back(r);
                }
            const int k = static_cast<int>(cands.size());
            for (int mask = 1; mask < (1 << k); ++mask) {
                Column col;
                for (int i = 0; i < k; ++i)
                    if (mask & (1 << i)) col.push_back(Cell{cands[i], pos_[cands[i]]});
                if (!distinct_instances(col)) continue;
                try_column(col, new_next, prev, -1);
                const auto& fresh = *a_.rows[0];
                for (int q = new_next; q < static_cast<int>(fresh.size()); ++q)
                    if (fresh.symbols[q].type == t) try_column(col, new_next, prev, q);
            }
        }
    }

    bool distinct_instances(const Column& col) const {
        for (std::size_t i = 0; i < col.size(); ++i)
            for (std::size_t j = i + 1; j < col.size(); ++j)
                if (a_.symbol(col[i]).instance == a_.symbol(col[j]).instance) return false;
        return true;
    }

    void try_column(Column col, int new_next, const Column& prev, int q) {
        if (q >= 0) col.insert(col.begin(), Cell{0, q});
        if (!prev.empty()) {
            bool shared = false;
            for (const auto& x : prev)
                for (const auto& y : col)
                    if (x.row == y.row) shared = true;
            if (!shared) return;
        }
        std::vector<char> in(n_, 0);
        for (const auto& c : col) in[c.row] = 1;
        std::vector<PairState> saved = pairs_;
        for (int ra = 1; ra < n_; ++ra)
            for (int rb = ra + 1; rb < n_; ++rb) {
                if (!in[ra] && !in[rb]) continue;
                PairState& s = pairs_[ra * n_ + rb];
                if (in[ra] && in[rb]) {
                    if (s.seen && s.a_since && s.b_since) {
                        pairs_ = saved;
                        return;
                    }
                    s = PairState{true, false, false};
                } else if (s.seen) {
                    s.a_since = s.a_since || in[ra];
                    s.b_since = s.b_since || in[rb];
                }
            }
        for (const auto& c : col)
            if (c.row != 0) ++pos_[c.row];
        a_.columns.push_back(col);
        step(q >= 0 ? q + 1 : new_next, col);
        a_.columns.pop_back();
        for (const auto& c : col)
            if (c.row != 0) --pos_[c.row];
        pairs_ = saved;
    }

    void record() {
        if (validate(a_, legality_) != Reject::none) return;
        ++result_.legal;
        double bn = 0, be = 0;
        for (const auto& col : a_.columns) {
            if (col.front().row == 0) bn += table_.new_bits(a_.symbol(col.front()).type);
            if (col.size() == 1 && a_.symbol(col.front()).is_id()) be += table_.bits(a_.symbol(col.front()).type);
        }
        double cd = bn - be;
        if (result_.best && cd <= result_.best->cd + 1e-12) return;
        Alignment copy = a_;
        finalise(copy, table_);
        result_.best = std::move(copy);
    }

    const CodeTable& table_;
    const LegalityOptions& legality_;
    OracleResult& result_;
    std::vector<int> prev_appearance_;
    Alignment a_;
    int n_ = 0;
    std::vector<int> pos_;
    std::vector<PairState> pairs_;
};

}  // namespace

OracleResult brute_force_best(const Pattern& fresh, const PatternStore& old, const CodeTable& table,
                              const LegalityOptions& legality, const OracleLimits& limits) {
    if (fresh.size() > limits.max_new)
        throw LimitError("New has " + std::to_string(fresh.size()) + " symbols; limit is " +
                         std::to_string(limits.max_new));
    if (old.size() > limits.max_patterns)
        throw LimitError("Old has " + std::to_string(old.size()) + " patterns; limit is " +
                         std::to_string(limits.max_patterns));
    for (const auto& p : old)
        if (p.size() > limits.max_pattern_size)
            throw LimitError("Old pattern exceeds " + std::to_string(limits.max_pattern_size) + " symbols");

    auto fresh_ptr = std::make_shared<const Pattern>(fresh);
    std::vector<PatternPtr> olds;
    for (const auto& p : old) olds.push_back(std::make_shared<const Pattern>(p));

    OracleResult result;
    const std::size_t k = olds.size();
    std::vector<int> counts(k, 0);
    const int base = limits.max_appearances + 1;
    std::size_t combos = 1;
    for (std::size_t i = 0; i < k; ++i) combos *= static_cast<std::size_t>(base);
    for (std::size_t code = 1; code < combos; ++code) {
        std::size_t c = code;
        std::vector<PatternPtr> rows;
        std::vector<int> prev{0};
        for (std::size_t i = 0; i < k; ++i) {
            int m = static_cast<int>(c % base);
            c /= base;
            for (int j = 0; j < m; ++j) {
                prev.push_back(j == 0 ? 0 : static_cast<int>(rows.size()));
                rows.push_back(olds[i]);
            }
        }
        Enumerator e(fresh_ptr, rows, prev, table, legality, result);
        e.go();
    }
    return result;
}

RandomInstance random_instance(std::mt19937_64& rng, const OracleLimits& limits, int alphabet) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto letter = [&] { return std::string(1, static_cast<char>('a' + pick(0, alphabet - 1))); };
    RandomInstance out;
    const int patterns = pick(1, static_cast<int>(limits.max_patterns));
    const bool frame = patterns >= 2 && limits.max_pattern_size >= 6 && pick(0, 1) == 1;
    const int leaves = frame ? patterns - 1 : patterns;
    const int max_c = std::max(1, static_cast<int>(limits.max_pattern_size) - 2);
    std::vector<std::vector<std::string>> contents;
    for (int i = 0; i < leaves; ++i) {
        std::vector<std::pair<std::string, Role>> tokens;
        std::string name = "P" + std::to_string(i + 1);
        tokens.emplace_back(name, Role::ID);
        std::vector<std::string> c;
        for (int j = pick(1, max_c); j > 0; --j) c.push_back(letter());
        for (const auto& t : c) tokens.emplace_back(t, Role::C);
        tokens.emplace_back("#" + name, Role::ID);
        contents.push_back(c);
        out.old.add(make_pattern(tokens, static_cast<std::uint64_t>(pick(1, 20))));
    }
    if (frame) {
        std::vector<std::pair<std::string, Role>> tokens{{"Q", Role::ID}};
        std::vector<std::string> c;
        for (int k = 0; k < 2; ++k) {
            int leaf = pick(0, leaves - 1);
            std::string name = "P" + std::to_string(leaf + 1);
            tokens.emplace_back(name, Role::C);
            tokens.emplace_back("#" + name, Role::C);
            c.insert(c.end(), contents[leaf].begin(), contents[leaf].end());
        }
        tokens.emplace_back("#Q", Role::ID);
        contents.push_back(c);
        out.old.add(make_pattern(tokens, static_cast<std::uint64_t>(pick(1, 20))));
    }
    std::vector<std::pair<std::string, Role>> fresh;
    const int target = pick(2, static_cast<int>(limits.max_new));
    while (static_cast<int>(fresh.size()) < target) {
        if (pick(0, 3) == 0) {
            fresh.emplace_back(letter(), Role::C);
            continue;
        }
        for (const auto& t : contents[pick(0, static_cast<int>(contents.size()) - 1)])
            if (static_cast<int>(fresh.size()) < target) fresh.emplace_back(t, Role::C);
    }
    out.fresh = make_pattern(fresh);
    return out;
}

const Alignment* comparable_best(const std::vector<Alignment>& ranked, int max_appearances) {
    for (const auto& a : ranked) {
        std::map<PatternId, int> uses;
        bool ok = true;
        for (std::size_t r = 1; r < a.rows.size(); ++r)
            if (++uses[a.rows[r]->id] > max_appearances) ok = false;
        if (ok) return &a;
    }
    return nullptr;
}

}  // namespace sp
