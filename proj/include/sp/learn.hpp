#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "sp/alignment.hpp"
#include "sp/coding.hpp"
#include "sp/core.hpp"
#include "sp/search.hpp"

namespace sp {

struct LearnConfig {
    double cost_factor = 10.0;
    double provisional_bits = 10.0;
    int derive_top = 3;         // best alignments per New pattern passed to derive_patterns
    int prune_width = 20;
    int full_per_new = 20;      // full alignments kept per New pattern when sifting
    bool per_grammar_frequencies = false;
    EngineConfig engine;
};

// A full alignment re-expressed for grammar compilation.
struct FullAlignment {
    Alignment alignment;
    std::vector<PatternId> patterns;               // distinct Old patterns, sorted
    std::map<PatternId, int> counts;               // appearances per pattern
    std::vector<std::pair<PatternId, int>> code;   // unmatched ID cells (pattern, position)
    double e = 0;
};

struct SiftResult {
    std::vector<std::vector<FullAlignment>> per_new;  // one list per New pattern
    std::map<PatternId, std::uint64_t> pattern_frequency;
    std::map<TokenId, std::uint64_t> symbol_frequency;
    std::set<TokenId> data_types;
    std::map<TokenId, double> bits;  // cost-factored for data types
    double o = 0;                    // cost-factored bits of the raw New patterns
};

struct Grammar {
    std::vector<PatternId> members;  // sorted
    std::vector<int> choice;         // chosen full alignment per New pattern
    double g = 0;
    double e = 0;
    double t() const { return g + e; }
};

struct StagePoint {
    double g = 0;
    double e = 0;
    double t = 0;
    double o = 0;
};

struct LearnedGrammar {
    std::vector<Pattern> patterns;  // cleaned and renumbered
    double g = 0;
    double e = 0;
    double t = 0;
    double t_raw = 0;
};

struct LearnResult {
    std::vector<LearnedGrammar> grammars;  // ascending T
    std::vector<StagePoint> curve;         // best grammar after each New pattern
    double o = 0;
    std::size_t old_size = 0;
};

class Learner {
public:
    explicit Learner(LearnConfig cfg = {});

    // Registers the corpus alphabet so generated symbols never collide with data.
    void set_corpus(const NewStream& corpus);

    const Pattern& ingest(const Pattern& fresh);
    std::vector<PatternId> derive_patterns(const Alignment& a);
    // Sets applicable when the alignment has a usable abstract row and something unmatched.
    std::vector<PatternId> derive_patterns(const Alignment& a, bool& applicable);
    void process(const Pattern& fresh);

    SiftResult sift_and_sort(const NewStream& corpus);
    std::vector<Grammar> compile_alternative_grammars(const SiftResult& sift,
                                                      std::vector<StagePoint>* curve = nullptr) const;
    LearnedGrammar cleanup(const Grammar& g, const SiftResult& sift) const;

    LearnResult learn(const NewStream& corpus);

    const PatternStore& old() const { return old_; }
    const LearnConfig& config() const { return cfg_; }
    bool is_class_symbol(TokenId t) const { return classes_.count(t) > 0; }

private:
    TokenId fresh_class();
    TokenId fresh_discriminator();
    Pattern make_member(TokenId cls, const std::vector<TokenId>& content);
    const Pattern* find_duplicate(const std::vector<TokenId>& content) const;
    void add_class(PatternId id, TokenId cls);
    TokenId single_member_class(const std::vector<TokenId>& content);
    void join_class(TokenId cls, const std::vector<TokenId>& content);
    CodeTable search_table() const;
    EngineConfig engine_config(bool mirror) const;

    LearnConfig cfg_;
    PatternStore old_;
    std::set<TokenId> classes_;
    std::set<TokenId> reserved_;
    NewStream corpus_;
    int next_class_ = 1;
    int next_disc_ = 1;
};

std::vector<TokenId> c_content(const Pattern& p);

// Every alignment in which all of New and all C-symbols of the Old rows are matched, where
// Old rows reference each other through "< class >" sequences. Sorted best first.
std::vector<Alignment> full_alignments(const Pattern& fresh, const PatternStore& old,
                                       const std::set<TokenId>& classes, const CodeTable& table,
                                       std::size_t cap = 4096);

// Patterns in a grammar that no other member references.
std::vector<const Pattern*> top_patterns(const std::vector<Pattern>& grammar);

// Every C-symbol string the grammar derives from its top patterns, up to a cap.
std::set<std::vector<TokenId>> generate(const std::vector<Pattern>& grammar, std::size_t cap = 10000);

}  // namespace sp
