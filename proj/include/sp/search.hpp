#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sp/alignment.hpp"
#include "sp/coding.hpp"
#include "sp/core.hpp"
#include "sp/matcher.hpp"

namespace sp {

struct EngineConfig {
    int driving_quota = 3;
    int target_quota = 10;
    int family_members = 3;  // equal-CD alignments of the same Old patterns kept per symbol
    std::optional<int> window_size;
    int max_unsupported_cycles = 10;
    std::optional<std::size_t> max_alignments_per_cycle;
    std::size_t max_sequences_per_pair = 200;  // most significant hit sequences kept per match
    int max_cycles = 100;
    int threads = 1;
    MatchParams match;  // alphabet_size 0 means "count tokens in New and Old"
    LegalityOptions legality;

    EngineConfig() { match.alphabet_size = 0; }
};

struct SearchStats {
    int cycles = 0;
    std::size_t formed = 0;
    std::size_t rejected = 0;
};

// Keeps, for each New position, the best alignments of up to quota families; a
// family is a run of equal-CD alignments built from the same Old patterns.
std::vector<Alignment> select_by_quota(const std::vector<Alignment>& ranked, int quota, int family_members = 3);

std::vector<Alignment> run(const Pattern& fresh, const PatternStore& old, const EngineConfig& cfg,
                           const CodeTable& table, SearchStats* stats = nullptr);

// Called after each window with the window's New length and its ranked
// alignments; returning false stops the run.
using WindowCallback = std::function<bool(std::size_t, const std::vector<Alignment>&)>;

std::vector<Alignment> run_windowed(const Pattern& fresh, const PatternStore& old,
                                    const EngineConfig& cfg, const CodeTable& table,
                                    const WindowCallback& on_window);

std::size_t alphabet_size(const Pattern& fresh, const PatternStore& old);

// The alignment encoding the most New symbols, ties going to the better one.
const Alignment* most_complete(const std::vector<Alignment>& ranked);

struct Production {
    std::vector<TokenId> words;
    std::optional<Alignment> alignment;
    bool complete = false;
};

// Decompression: runs the engine with the code as New (C-symbols, ID/C hits
// only), widening the quotas until every code symbol is matched, and reads off
// the unmatched C-symbols that are never used as ID-symbols in Old.
Production produce(const PatternStore& old, const std::vector<TokenId>& code, EngineConfig cfg,
                   const CodingOptions& coding = {});

}  // namespace sp
