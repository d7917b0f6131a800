#pragma once

#include <string>

#include "sp/io.hpp"
#include "sp/search.hpp"

namespace fx {

inline std::string path(const std::string& name) { return std::string(SP_FIXTURE_DIR) + "/" + name; }

inline sp::PatternStore old(const std::string& name) { return sp::make_store(sp::load_patterns(path(name))); }

inline sp::Pattern fresh(const std::string& name) { return sp::load_patterns(path(name)).at(0); }

inline std::vector<sp::Alignment> ranked(const sp::PatternStore& old, const sp::Pattern& fresh,
                                         const sp::EngineConfig& cfg = {}) {
    sp::CodeTable table = sp::derive_code_table(old, {fresh});
    return sp::run(fresh, old, cfg, table);
}

}  // namespace fx
