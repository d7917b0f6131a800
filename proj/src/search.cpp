#include "sp/search.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace sp {

std::size_t alphabet_size(const Pattern& fresh, const PatternStore& old) {
    std::unordered_set<TokenId> types;
    for (const auto& s : fresh.symbols) types.insert(s.type);
    for (const auto& p : old)
        for (const auto& s : p.symbols) types.insert(s.type);
    return std::max<std::size_t>(2, types.size());
}

std::vector<Alignment> select_by_quota(const std::vector<Alignment>& ranked, int quota, int family_members) {
    struct Slot {
        int families = 0;
        int members = 0;
        double cd = 0;
        std::vector<PatternId> rows;
    };
    std::unordered_map<int, Slot> slots;
    std::vector<Alignment> out;
    for (const auto& a : ranked) {
        std::vector<PatternId> rows;
        for (std::size_t r = 1; r < a.rows.size(); ++r) rows.push_back(a.rows[r]->id);
        std::sort(rows.begin(), rows.end());
        bool keep = false;
        for (int pos : a.new_hits()) {
            Slot& s = slots[pos];
            bool same_family = s.families > 0 && std::fabs(s.cd - a.cd) <= 1e-9 && s.rows == rows;
            if (same_family) {
                if (s.families <= quota && s.members < std::min(quota, family_members)) keep = true;
                ++s.members;
            } else {
                ++s.families;
                s.members = 1;
                s.cd = a.cd;
                s.rows = rows;
                if (s.families <= quota) keep = true;
            }
        }
        if (keep) out.push_back(a);
    }
    return out;
}

namespace {

constexpr const char* kNewKey = "new";

class Engine {
public:
    Engine(PatternPtr fresh, const PatternStore& old, const EngineConfig& cfg,
           const CodeTable& table)
        : fresh_(std::move(fresh)), cfg_(cfg), table_(table) {
        params_ = cfg.match;
        if (params_.alphabet_size == 0) params_.alphabet_size = alphabet_size(*fresh_, old);
        for (const auto& p : old) {
            auto ptr = std::make_shared<const Pattern>(p);
            Alignment s = single_row(fresh_, ptr);
            s.key = "old:" + std::to_string(p.id);
            singles_.push_back(std::move(s));
        }
        driver_new_ = new_driver(fresh_);
        driver_new_.key = kNewKey;
    }

    void seed(const std::vector<Alignment>& seeds) {
        for (auto a : seeds) {
            a.rows[0] = fresh_;
            if (validate(a, cfg_.legality) != Reject::none) continue;
            finalise(a, table_);
            if (archive_.count(a.key)) continue;
            archive_.emplace(a.key, a);
            retained_.push_back(std::move(a));
        }
        std::sort(retained_.begin(), retained_.end(), better);
    }

    std::vector<Alignment> run(SearchStats* stats) {
        double best = retained_.empty() ? -1e300 : retained_.front().cd;
        int unsupported = 0;
        int cycle = 0;
        for (; cycle < cfg_.max_cycles; ++cycle) {
            std::vector<const Alignment*> drivers{&driver_new_};
            driver_pool_ = select_by_quota(retained_, cfg_.driving_quota, cfg_.family_members);
            for (const auto& d : driver_pool_) drivers.push_back(&d);
            std::vector<const Alignment*> targets;
            for (const auto& s : singles_) targets.push_back(&s);
            for (const auto& r : retained_) targets.push_back(&r);

            std::vector<std::pair<const Alignment*, const Alignment*>> tasks;
            for (const Alignment* d : drivers)
                for (const Alignment* t : targets) {
                    if (d->key == t->key) continue;
                    if (!memo_.insert(d->key + "#" + t->key).second) continue;
                    tasks.emplace_back(d, t);
                }
            auto produced = execute(tasks, stats);
            if (stats) stats->cycles = cycle + 1;
            if (produced.empty()) break;
            for (auto& a : produced) archive_.emplace(a.key, a);
            std::vector<Alignment> pool = retained_;
            pool.insert(pool.end(), produced.begin(), produced.end());
            std::sort(pool.begin(), pool.end(), better);
            retained_ = select_by_quota(pool, cfg_.target_quota, cfg_.family_members);
            double now = retained_.empty() ? -1e300 : retained_.front().cd;
            if (now > best + 1e-9) {
                best = now;
                unsupported = 0;
            } else if (++unsupported >= cfg_.max_unsupported_cycles) {
                break;
            }
        }
        std::vector<Alignment> out;
        out.reserve(archive_.size());
        for (auto& [k, a] : archive_) out.push_back(a);
        std::sort(out.begin(), out.end(), better);
        return out;
    }

private:
    struct Candidate {
        std::size_t task;
        HitSequence seq;
    };

    std::vector<Alignment> execute(
        const std::vector<std::pair<const Alignment*, const Alignment*>>& tasks, SearchStats* stats) {
        std::vector<std::vector<HitSequence>> seqs(tasks.size());
        auto match_task = [&](std::size_t i) {
            auto d = projection_symbols(*tasks[i].first);
            auto t = projection_symbols(*tasks[i].second);
            auto& found = seqs[i];
            found = broadcast_match(d, {t}, params_, true).sequences;
            const std::size_t cap = cfg_.max_sequences_per_pair;
            if (cap && found.size() > cap) {
                std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(cap), found.end(),
                                  more_significant);
                found.resize(cap);
            }
        };
        parallel_for(tasks.size(), match_task);

        std::vector<Candidate> cands;
        for (std::size_t i = 0; i < tasks.size(); ++i)
            for (auto& s : seqs[i]) cands.push_back(Candidate{i, std::move(s)});
        if (cfg_.max_alignments_per_cycle && cands.size() > *cfg_.max_alignments_per_cycle) {
            std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
                return more_significant(a.seq, b.seq);
            });
            cands.resize(*cfg_.max_alignments_per_cycle);
        }

        std::vector<std::optional<Alignment>> built(cands.size());
        std::vector<char> rejected(cands.size(), 0);
        auto build = [&](std::size_t i) {
            const auto& c = cands[i];
            auto r = extend(*tasks[c.task].first, c.seq.hits, *tasks[c.task].second, cfg_.legality);
            if (!r.alignment) {
                rejected[i] = 1;
                return;
            }
            finalise(*r.alignment, table_);
            built[i] = std::move(r.alignment);
        };
        parallel_for(cands.size(), build);

        std::vector<Alignment> produced;
        std::unordered_set<std::string> fresh_keys;
        for (std::size_t i = 0; i < built.size(); ++i) {
            if (rejected[i] && stats) ++stats->rejected;
            if (!built[i]) continue;
            const auto& k = built[i]->key;
            if (archive_.count(k) || !fresh_keys.insert(k).second) continue;
            produced.push_back(std::move(*built[i]));
        }
        if (complete_with_new_) {
            std::vector<std::pair<const Alignment*, const Alignment*>> follow;
            for (const auto& a : produced)
                if (memo_.insert(std::string(kNewKey) + "#" + a.key).second)
                    follow.emplace_back(&driver_new_, &a);
            if (!follow.empty()) {
                complete_with_new_ = false;
                auto more = execute(follow, stats);
                complete_with_new_ = true;
                for (auto& a : more)
                    if (fresh_keys.insert(a.key).second) produced.push_back(std::move(a));
            }
        }
        if (stats && complete_with_new_) stats->formed += produced.size();
        std::sort(produced.begin(), produced.end(), better);
        return produced;
    }

    template <typename F>
    void parallel_for(std::size_t n, F&& f) {
        int threads = std::max(1, cfg_.threads);
        if (threads == 1 || n < 2) {
            for (std::size_t i = 0; i < n; ++i) f(i);
            return;
        }
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += threads) f(i);
            });
        for (auto& th : pool) th.join();
    }

    PatternPtr fresh_;
    const EngineConfig& cfg_;
    const CodeTable& table_;
    MatchParams params_;
    std::vector<Alignment> singles_;
    Alignment driver_new_;
    std::vector<Alignment> driver_pool_;
    std::vector<Alignment> retained_;
    std::unordered_map<std::string, Alignment> archive_;
    std::unordered_set<std::string> memo_;
    bool complete_with_new_ = true;
};

}  // namespace

std::vector<Alignment> run(const Pattern& fresh, const PatternStore& old, const EngineConfig& cfg,
                           const CodeTable& table, SearchStats* stats) {
    if (cfg.window_size && *cfg.window_size < static_cast<int>(fresh.size()))
        return run_windowed(fresh, old, cfg, table, nullptr);
    Engine engine(std::make_shared<const Pattern>(fresh), old, cfg, table);
    return engine.run(stats);
}

std::vector<Alignment> run_windowed(const Pattern& fresh, const PatternStore& old,
                                    const EngineConfig& cfg, const CodeTable& table,
                                    const WindowCallback& on_window) {
    const std::size_t n = fresh.size();
    const std::size_t w = static_cast<std::size_t>(std::max(1, cfg.window_size.value_or(static_cast<int>(n))));
    std::vector<Alignment> carried;
    std::vector<Alignment> result;
    for (std::size_t end = std::min(w, n);; end = std::min(end + w, n)) {
        auto prefix = std::make_shared<Pattern>(fresh);
        prefix->symbols.resize(end);
        Engine engine(prefix, old, cfg, table);
        engine.seed(carried);
        result = engine.run(nullptr);
        carried = select_by_quota(result, cfg.target_quota, cfg.family_members);
        if (on_window && !on_window(end, result)) break;
        if (end == n) break;
    }
    return result;
}

const Alignment* most_complete(const std::vector<Alignment>& ranked) {
    const Alignment* best = nullptr;
    std::size_t most = 0;
    for (const auto& a : ranked) {
        std::size_t n = a.new_hits().size();
        if (!best || n > most || (n == most && better(a, *best))) {
            best = &a;
            most = n;
        }
    }
    return best;
}

Production produce(const PatternStore& old, const std::vector<TokenId>& code, EngineConfig cfg,
                   const CodingOptions& coding) {
    Production out;
    if (code.empty()) return out;
    Pattern fresh;
    for (TokenId t : code) fresh.symbols.push_back(Symbol{t, Role::C, fresh_instance()});
    CodeTable table = derive_code_table(old, {fresh}, coding);
    cfg.match.id_c_only = true;
    std::unordered_set<TokenId> service;
    for (const auto& p : old)
        for (const auto& s : p.symbols)
            if (s.is_id()) service.insert(s.type);

    const std::pair<int, int> steps[] = {{cfg.target_quota, cfg.driving_quota}, {50, 10}, {100, 20}};
    for (auto [tq, dq] : steps) {
        if (tq < cfg.target_quota) continue;
        cfg.target_quota = tq;
        cfg.driving_quota = std::max(dq, cfg.driving_quota);
        auto ranked = run(fresh, old, cfg, table);
        const Alignment* best = most_complete(ranked);
        if (!best) continue;
        out.alignment = *best;
        out.complete = best->new_hits().size() == fresh.size();
        if (out.complete) break;
    }
    if (!out.alignment) return out;
    for (const auto& col : out.alignment->columns) {
        if (col.size() != 1 || col[0].row == 0) continue;
        const Symbol& s = out.alignment->symbol(col[0]);
        if (!s.is_id() && !service.count(s.type)) out.words.push_back(s.type);
    }
    return out;
}

}  // namespace sp
