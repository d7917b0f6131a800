#include "sp/coding.hpp"

#include <cmath>

namespace sp {

double ideal_bits(double p) { return -std::log2(p); }

double sfe_bits(double p) { return std::ceil(std::log2(1.0 / p)) + 1.0; }

double CodeTable::bits(TokenId t) const {
    if (auto it = fixed.find(t); it != fixed.end()) return it->second;
    if (auto it = entries.find(t); it != entries.end()) return it->second.bits;
    return provisional_bits;
}

const CodeEntry* CodeTable::entry(TokenId t) const {
    auto it = entries.find(t);
    return it == entries.end() ? nullptr : &it->second;
}

double CodeTable::entropy() const {
    double h = 0;
    for (const auto& [t, e] : entries)
        if (e.probability > 0) h -= e.probability * std::log2(e.probability);
    return h;
}

CodeTable derive_code_table(const std::vector<const Pattern*>& patterns,
                            const CodingOptions& opt) {
    if (opt.cost_factor < 1.0) throw ValidationError("cost factor must be at least 1");
    CodeTable table;
    table.cost_factor = opt.cost_factor;
    table.sfe_integer = opt.sfe_integer;
    for (const Pattern* p : patterns)
        for (const auto& s : p->symbols) {
            table.entries[s.type].mass += static_cast<double>(p->frequency);
            table.total_mass += static_cast<double>(p->frequency);
        }
    for (auto& [t, e] : table.entries) {
        e.probability = e.mass / table.total_mass;
        e.bits = opt.sfe_integer ? sfe_bits(e.probability) : ideal_bits(e.probability);
    }
    return table;
}

CodeTable derive_code_table(const PatternStore& old, const NewStream& fresh,
                            const CodingOptions& opt) {
    std::vector<const Pattern*> all;
    for (const auto& p : old) all.push_back(&p);
    for (const auto& p : fresh) all.push_back(&p);
    if (all.empty()) throw ValidationError("no patterns to derive a code table from");
    return derive_code_table(all, opt);
}

double redundancy_estimate(const std::vector<FrequencySize>& patterns) {
    double r = 0;
    for (const auto& p : patterns) r += static_cast<double>(p.frequency - 1) * p.bits;
    return r;
}

SearchSpace search_space_stats(unsigned n) {
    SearchSpace s{};
    const double log10_2 = std::log10(2.0);
    s.log10_subsequences = n >= 64 ? n * log10_2 : std::log10(std::ldexp(1.0, n) - 1.0);
    // log10(P(P-1)/2) with P-1 ~ P for large n
    s.log10_comparisons = n >= 64 ? 2 * n * log10_2 - log10_2
                                  : std::log10((std::ldexp(1.0L, n) - 1.0L) *
                                               (std::ldexp(1.0L, n) - 2.0L) / 2.0L);
    if (n < 16000) {
        long double p = std::ldexp(1.0L, static_cast<int>(n)) - 1.0L;
        s.subsequences = p;
        s.comparisons = p * (p - 1.0L) / 2.0L;
    } else {
        s.subsequences = s.comparisons = HUGE_VALL;
    }
    return s;
}

}  // namespace sp
