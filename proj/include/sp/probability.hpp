#pragma once

#include <vector>

#include "sp/alignment.hpp"

namespace sp {

struct ReferenceSet {
    std::vector<int> reference_symbols;  // New positions encoded by the best alignment
    std::vector<Alignment> members;      // edited, deduped, ranked
    double p_a_sum = 0;
};

struct PatternProbability {
    PatternPtr pattern;
    double p_rel = 0;
};

struct SymbolProbability {
    TokenId type = 0;
    double p_rel = 0;
    bool in_new = false;
};

struct InferenceReport {
    std::vector<double> p_abs;
    std::vector<double> p_rel;
    std::vector<PatternProbability> patterns;  // descending p_rel
    std::vector<SymbolProbability> symbols;    // descending p_rel
};

double absolute_probability(const Alignment& a);

// Drops Old rows whose symbols all appear, in order, in another Old row.
Alignment remove_redundant_rows(const Alignment& a);

ReferenceSet build_reference_set(const std::vector<Alignment>& ranked, bool superset = false);

InferenceReport relative_probabilities(const ReferenceSet& ref);

}  // namespace sp
