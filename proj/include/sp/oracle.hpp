#pragma once

#include <optional>
#include <random>

#include "sp/alignment.hpp"
#include "sp/coding.hpp"

namespace sp {

struct OracleLimits {
    std::size_t max_new = 8;
    std::size_t max_patterns = 4;
    std::size_t max_pattern_size = 6;
    int max_appearances = 2;
};

struct OracleResult {
    std::optional<Alignment> best;
    std::size_t legal = 0;
    double best_cd() const { return best ? best->cd : 0; }
};

class LimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exhaustive enumeration of every legal alignment of New against Old, built
// column by column; independent of the matcher and the search engine.
OracleResult brute_force_best(const Pattern& fresh, const PatternStore& old, const CodeTable& table,
                              const LegalityOptions& legality = {}, const OracleLimits& limits = {});

struct RandomInstance {
    Pattern fresh;
    PatternStore old;
};

// A small instance within the limits: Old patterns "P c... #P" over a few letters,
// New spliced from their C-symbols with occasional noise.
RandomInstance random_instance(std::mt19937_64& rng, const OracleLimits& limits = {},
                               int alphabet = 4);

// Engine best restricted to alignments that use each Old pattern at most
// max_appearances times, so that it is comparable with the oracle.
const Alignment* comparable_best(const std::vector<Alignment>& ranked, int max_appearances);

}  // namespace sp
