#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sp/core.hpp"

namespace sp {

// One position of a driving or target sequence as seen by the matcher. For a raw
// pattern the derivation set is the symbol's own instance; for a projected
// alignment column it holds every instance unified into that column.
struct MatchSymbol {
    TokenId type = 0;
    Role role = Role::C;
    std::vector<InstanceId> derivation;  // sorted
    int new_pos = -1;
    int copy_index = -1;
};

std::vector<MatchSymbol> match_symbols(const Pattern& p);

struct MatchParams {
    std::size_t alphabet_size = 2;
    std::size_t capacity = 10000;
    std::optional<int> max_gap_driving;
    std::optional<int> max_gap_target;
    bool id_c_only = false;
    bool section_rule = true;
    bool mirror = false;

    double p1() const { return 1.0 / static_cast<double>(alphabet_size); }
};

struct Hit {
    int driving_pos = 0;
    int target_pos = 0;
    int target_id = 0;
    friend bool operator==(const Hit&, const Hit&) = default;
};

struct HitSequence {
    std::vector<Hit> hits;
    double log2_p = 0;

    double p_n() const;
    std::vector<int> gaps() const;
};

bool can_hit(const MatchSymbol& a, const MatchSymbol& b, const MatchParams& params);

double p_n_step(double prev_p, int gap, double p1);
double p_n_batch(const std::vector<int>& gaps, double p1);

// Ranking: lower p_n first, then longer, then lexicographically smaller hits.
bool more_significant(const HitSequence& a, const HitSequence& b);

class HitTree {
public:
    struct Node {
        Hit hit;
        int parent = -1;
        double log2_p = 0;
        int depth = 0;
        bool alive = true;
        std::vector<int> children;
    };

    explicit HitTree(const MatchParams& params);

    void add_hit(const Hit& h);
    void purge();

    std::size_t alive_count() const { return alive_; }
    std::size_t purges() const { return purges_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    std::vector<HitSequence> leaf_sequences() const;
    std::vector<HitSequence> all_sequences() const;
    HitSequence path_to(int node) const;

private:
    bool precedes(const Hit& a, const Hit& b) const;
    bool gap_ok(const Hit& a, const Hit& b) const;
    int attach(const Hit& h, int parent);
    void compact();

    MatchParams params_;
    std::vector<Node> nodes_;
    std::vector<int> roots_;
    std::unordered_map<int, std::vector<int>> live_;
    std::size_t alive_ = 0;
    std::size_t purges_ = 0;
};

struct MatchResult {
    std::vector<HitSequence> sequences;
    std::size_t purges = 0;
    std::size_t nodes = 0;
};

// Broadcasts each driving symbol against every target symbol.
// With all_paths set, every root-to-node path is returned rather than only
// root-to-leaf paths.
MatchResult broadcast_match(const std::vector<MatchSymbol>& driving,
                            const std::vector<std::vector<MatchSymbol>>& targets,
                            const MatchParams& params, bool all_paths = false);

MatchResult broadcast_match(const Pattern& driving, const std::vector<Pattern>& targets,
                            const MatchParams& params, bool all_paths = false);

}  // namespace sp
