#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sp {

using TokenId = std::uint32_t;
using InstanceId = std::uint64_t;
using PatternId = std::uint64_t;

enum class Role : std::uint8_t { ID, C };

// Process-wide token interning; ids are dense and stable for the process lifetime.
TokenId intern(std::string_view text);
const std::string& token_text(TokenId id);

InstanceId fresh_instance();
PatternId fresh_pattern_id();

struct Symbol {
    TokenId type = 0;
    Role role = Role::C;
    InstanceId instance = 0;

    const std::string& token() const { return token_text(type); }
    bool is_id() const { return role == Role::ID; }
};

struct Pattern {
    PatternId id = 0;
    std::vector<Symbol> symbols;
    std::uint64_t frequency = 1;
    // Set for learning copies: id of the New pattern this pattern was copied from,
    // and the offset of the first copied symbol.
    PatternId copy_of = 0;
    int copy_offset = 0;

    std::size_t size() const { return symbols.size(); }
    std::string text() const;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

Pattern make_pattern(const std::vector<std::pair<std::string, Role>>& tokens,
                     std::uint64_t frequency = 1);

bool symbols_match(const Symbol& a, const Symbol& b);

class PatternStore {
public:
    const Pattern& add(Pattern p);
    const Pattern* find(PatternId id) const;
    Pattern* find_mut(PatternId id);
    bool remove(PatternId id);

    const std::vector<Pattern>& patterns() const { return patterns_; }
    std::vector<Pattern>& patterns() { return patterns_; }
    std::size_t size() const { return patterns_.size(); }
    bool empty() const { return patterns_.empty(); }
    auto begin() const { return patterns_.begin(); }
    auto end() const { return patterns_.end(); }

private:
    std::vector<Pattern> patterns_;
};

using NewStream = std::vector<Pattern>;

}  // namespace sp
