#include "sp/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_map>

namespace sp {

std::vector<MatchSymbol> match_symbols(const Pattern& p) {
    std::vector<MatchSymbol> out;
    out.reserve(p.size());
    for (const auto& s : p.symbols) out.push_back(MatchSymbol{s.type, s.role, {s.instance}, -1, -1});
    return out;
}

double HitSequence::p_n() const { return std::exp2(log2_p); }

std::vector<int> HitSequence::gaps() const {
    std::vector<int> g;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        if (i == 0) {
            g.push_back(0);
            continue;
        }
        g.push_back(hits[i].driving_pos - hits[i - 1].driving_pos - 1 + hits[i].target_pos -
                    hits[i - 1].target_pos - 1);
    }
    return g;
}

double p_n_step(double prev_p, int gap, double p1) {
    return prev_p * (1.0 - std::pow(1.0 - p1, gap + 1));
}

double p_n_batch(const std::vector<int>& gaps, double p1) {
    double p = 1.0;
    for (int g : gaps) p *= 1.0 - std::pow(1.0 - p1, g + 1);
    return p;
}

namespace {

bool disjoint(const std::vector<InstanceId>& a, const std::vector<InstanceId>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return false;
        if (*i < *j) ++i; else ++j;
    }
    return true;
}

bool mirror_ok(const MatchSymbol& a, const MatchSymbol& b) {
    if (a.new_pos >= 0 && b.copy_index >= 0 && b.copy_index >= a.new_pos) return false;
    if (b.new_pos >= 0 && a.copy_index >= 0 && a.copy_index >= b.new_pos) return false;
    return true;
}

double log2_factor(int gap, double p1) { return std::log2(1.0 - std::pow(1.0 - p1, gap + 1)); }

bool lex_less(const std::vector<Hit>& a, const std::vector<Hit>& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(), [](const Hit& x, const Hit& y) {
            return std::tie(x.driving_pos, x.target_id, x.target_pos) <
                   std::tie(y.driving_pos, y.target_id, y.target_pos);
        });
}

}  // namespace

bool can_hit(const MatchSymbol& a, const MatchSymbol& b, const MatchParams& params) {
    if (a.type != b.type) return false;
    if (a.new_pos >= 0 && b.new_pos >= 0) return false;
    if (params.id_c_only && a.role == b.role) return false;
    if (params.mirror && !mirror_ok(a, b)) return false;
    return disjoint(a.derivation, b.derivation);
}

bool more_significant(const HitSequence& a, const HitSequence& b) {
    if (a.log2_p != b.log2_p) return a.log2_p < b.log2_p;
    if (a.hits.size() != b.hits.size()) return a.hits.size() > b.hits.size();
    return lex_less(a.hits, b.hits);
}

HitTree::HitTree(const MatchParams& params) : params_(params) {}

bool HitTree::precedes(const Hit& a, const Hit& b) const {
    if (params_.section_rule && a.target_id != b.target_id) return false;
    if (a.target_id != b.target_id) return a.driving_pos < b.driving_pos;
    return a.driving_pos < b.driving_pos && a.target_pos < b.target_pos;
}

bool HitTree::gap_ok(const Hit& a, const Hit& b) const {
    if (params_.max_gap_driving && b.driving_pos - a.driving_pos - 1 > *params_.max_gap_driving)
        return false;
    if (a.target_id == b.target_id && params_.max_gap_target &&
        b.target_pos - a.target_pos - 1 > *params_.max_gap_target)
        return false;
    return true;
}

int HitTree::attach(const Hit& h, int parent) {
    Node n;
    n.hit = h;
    n.parent = parent;
    const double p1 = params_.p1();
    if (parent < 0) {
        n.log2_p = std::log2(p1);
        n.depth = 1;
    } else {
        const Node& par = nodes_[parent];
        int gap = h.driving_pos - par.hit.driving_pos - 1;
        if (h.target_id == par.hit.target_id) gap += h.target_pos - par.hit.target_pos - 1;
        n.log2_p = par.log2_p + log2_factor(gap, p1);
        n.depth = par.depth + 1;
    }
    nodes_.push_back(std::move(n));
    int id = static_cast<int>(nodes_.size()) - 1;
    live_[h.target_id].push_back(id);
    if (parent < 0) roots_.push_back(id);
    else nodes_[parent].children.push_back(id);
    ++alive_;
    return id;
}

void HitTree::add_hit(const Hit& h) {
    if (nodes_.size() > 2 * alive_ + 64) compact();
    std::vector<int> parents;
    std::vector<int> scan;
    if (params_.section_rule) {
        if (auto it = live_.find(h.target_id); it != live_.end()) scan = it->second;
    } else {
        for (const auto& [t, ids] : live_) scan.insert(scan.end(), ids.begin(), ids.end());
        std::sort(scan.begin(), scan.end());
    }
    for (int i : scan) {
        const Node& x = nodes_[i];
        if (!x.alive || !precedes(x.hit, h)) continue;
        bool child_precedes = false;
        for (int c : x.children)
            if (nodes_[c].alive && precedes(nodes_[c].hit, h)) {
                child_precedes = true;
                break;
            }
        if (child_precedes || !gap_ok(x.hit, h)) continue;
        parents.push_back(i);
    }
    if (parents.empty()) parents.push_back(-1);
    for (int par : parents) {
        if (alive_ >= std::max<std::size_t>(params_.capacity, 2)) {
            purge();
            if (par >= 0 && !nodes_[par].alive) continue;
        }
        attach(h, par);
    }
}

HitSequence HitTree::path_to(int node) const {
    HitSequence s;
    s.log2_p = nodes_[node].log2_p;
    for (int n = node; n >= 0; n = nodes_[n].parent) s.hits.push_back(nodes_[n].hit);
    std::reverse(s.hits.begin(), s.hits.end());
    return s;
}

void HitTree::purge() {
    std::vector<int> live;
    for (const auto& [t, ids] : live_) live.insert(live.end(), ids.begin(), ids.end());
    std::sort(live.begin(), live.end());
    std::vector<int> leaf_ids;
    for (int i : live) {
        const Node& n = nodes_[i];
        bool leaf = std::none_of(n.children.begin(), n.children.end(),
                                 [&](int c) { return nodes_[c].alive; });
        if (leaf) leaf_ids.push_back(i);
    }
    // Paths are only needed to break ties in probability and length.
    std::vector<std::optional<std::vector<Hit>>> paths(leaf_ids.size());
    auto path = [&](std::size_t k) -> const std::vector<Hit>& {
        if (!paths[k]) paths[k] = path_to(leaf_ids[k]).hits;
        return *paths[k];
    };
    std::vector<std::size_t> order(leaf_ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Node& x = nodes_[leaf_ids[a]];
        const Node& y = nodes_[leaf_ids[b]];
        if (x.log2_p != y.log2_p) return x.log2_p < y.log2_p;
        if (x.depth != y.depth) return x.depth > y.depth;
        return lex_less(path(a), path(b));
    });
    std::size_t remove = (leaf_ids.size() + 1) / 2;
    std::size_t keep = std::max<std::size_t>(1, leaf_ids.size() - remove);
    std::unordered_map<int, char> keep_node;
    for (std::size_t k = 0; k < keep && k < order.size(); ++k)
        for (int n = leaf_ids[order[k]]; n >= 0 && !keep_node.count(n); n = nodes_[n].parent)
            keep_node[n] = 1;
    for (int i : live)
        if (!keep_node.count(i)) {
            nodes_[i].alive = false;
            nodes_[i].children.clear();
            --alive_;
        }
    for (int i : live)
        if (nodes_[i].alive)
            std::erase_if(nodes_[i].children, [&](int c) { return !nodes_[c].alive; });
    std::erase_if(roots_, [&](int r) { return !nodes_[r].alive; });
    for (auto& [t, ids] : live_) std::erase_if(ids, [&](int i) { return !nodes_[i].alive; });
    ++purges_;
}

void HitTree::compact() {
    std::vector<int> remap(nodes_.size(), -1);
    std::vector<Node> kept;
    kept.reserve(alive_);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].alive) {
            remap[i] = static_cast<int>(kept.size());
            kept.push_back(std::move(nodes_[i]));
        }
    for (Node& n : kept) {
        if (n.parent >= 0) n.parent = remap[n.parent];
        for (int& c : n.children) c = remap[c];
    }
    for (int& r : roots_) r = remap[r];
    for (auto& [t, ids] : live_)
        for (int& i : ids) i = remap[i];
    nodes_ = std::move(kept);
}

std::vector<HitSequence> HitTree::leaf_sequences() const {
    std::vector<HitSequence> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (!n.alive) continue;
        bool leaf = std::none_of(n.children.begin(), n.children.end(),
                                 [&](int c) { return nodes_[c].alive; });
        if (leaf) out.push_back(path_to(static_cast<int>(i)));
    }
    std::sort(out.begin(), out.end(), more_significant);
    return out;
}

std::vector<HitSequence> HitTree::all_sequences() const {
    std::vector<HitSequence> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].alive) out.push_back(path_to(static_cast<int>(i)));
    std::sort(out.begin(), out.end(), more_significant);
    return out;
}

MatchResult broadcast_match(const std::vector<MatchSymbol>& driving,
                            const std::vector<std::vector<MatchSymbol>>& targets,
                            const MatchParams& params, bool all_paths) {
    HitTree tree(params);
    std::vector<std::unordered_map<TokenId, std::vector<int>>> index(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t)
        for (std::size_t j = 0; j < targets[t].size(); ++j)
            index[t][targets[t][j].type].push_back(static_cast<int>(j));
    for (std::size_t d = 0; d < driving.size(); ++d) {
        for (std::size_t t = 0; t < targets.size(); ++t) {
            auto it = index[t].find(driving[d].type);
            if (it == index[t].end()) continue;
            for (int j : it->second)
                if (can_hit(driving[d], targets[t][j], params))
                    tree.add_hit(Hit{static_cast<int>(d), j, static_cast<int>(t)});
        }
    }
    MatchResult r;
    r.sequences = all_paths ? tree.all_sequences() : tree.leaf_sequences();
    r.purges = tree.purges();
    r.nodes = tree.alive_count();
    return r;
}

MatchResult broadcast_match(const Pattern& driving, const std::vector<Pattern>& targets,
                            const MatchParams& params, bool all_paths) {
    std::vector<std::vector<MatchSymbol>> ts;
    for (const auto& t : targets) ts.push_back(match_symbols(t));
    return broadcast_match(match_symbols(driving), ts, params, all_paths);
}

}  // namespace sp
