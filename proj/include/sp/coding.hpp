#pragma once

#include <unordered_map>
#include <vector>

#include "sp/core.hpp"

namespace sp {

struct CodeEntry {
    double mass = 0;
    double probability = 0;
    double bits = 0;
};

class CodeTable {
public:
    double cost_factor = 2.0;
    double total_mass = 0;
    bool sfe_integer = false;
    double provisional_bits = 10.0;

    // Code size of a symbol type; fixed sizes take precedence, unknown tokens get
    // the provisional size.
    double bits(TokenId t) const;
    double new_bits(TokenId t) const { return bits(t) * cost_factor; }
    bool contains(TokenId t) const { return entries.count(t) > 0; }
    const CodeEntry* entry(TokenId t) const;

    void set_fixed(TokenId t, double b) { fixed[t] = b; }
    void clear_fixed() { fixed.clear(); }

    double entropy() const;

    std::unordered_map<TokenId, CodeEntry> entries;
    std::unordered_map<TokenId, double> fixed;
};

struct CodingOptions {
    double cost_factor = 2.0;
    bool sfe_integer = false;
};

CodeTable derive_code_table(const PatternStore& old, const NewStream& fresh,
                            const CodingOptions& opt = {});
CodeTable derive_code_table(const std::vector<const Pattern*>& patterns,
                            const CodingOptions& opt = {});

double ideal_bits(double p);
double sfe_bits(double p);

struct FrequencySize {
    std::uint64_t frequency;
    double bits;
};
double redundancy_estimate(const std::vector<FrequencySize>& patterns);

struct SearchSpace {
    long double subsequences;
    long double comparisons;
    double log10_subsequences;
    double log10_comparisons;
};
SearchSpace search_space_stats(unsigned n);

}  // namespace sp
