#include "sp/core.hpp"

#include <atomic>
#include <deque>
#include <mutex>
#include <unordered_map>

namespace sp {

namespace {

struct Vocabulary {
    std::mutex mu;
    std::deque<std::string> texts;
    std::unordered_map<std::string_view, TokenId> ids;
};

Vocabulary& vocabulary() {
    static Vocabulary v;
    return v;
}

std::atomic<InstanceId> next_instance{1};
std::atomic<PatternId> next_pattern{1};

}  // namespace

TokenId intern(std::string_view text) {
    auto& v = vocabulary();
    std::lock_guard<std::mutex> lock(v.mu);
    if (auto it = v.ids.find(text); it != v.ids.end()) return it->second;
    v.texts.emplace_back(text);
    auto id = static_cast<TokenId>(v.texts.size() - 1);
    v.ids.emplace(v.texts.back(), id);
    return id;
}

const std::string& token_text(TokenId id) {
    auto& v = vocabulary();
    std::lock_guard<std::mutex> lock(v.mu);
    return v.texts.at(id);
}

InstanceId fresh_instance() { return next_instance.fetch_add(1); }
PatternId fresh_pattern_id() { return next_pattern.fetch_add(1); }

std::string Pattern::text() const {
    std::string out;
    for (const auto& s : symbols) {
        if (!out.empty()) out += ' ';
        out += s.token();
    }
    return out;
}

Pattern make_pattern(const std::vector<std::pair<std::string, Role>>& tokens,
                     std::uint64_t frequency) {
    if (tokens.empty()) throw ValidationError("pattern has no symbols");
    if (frequency < 1) throw ValidationError("pattern frequency must be at least 1");
    Pattern p;
    p.id = fresh_pattern_id();
    p.frequency = frequency;
    p.symbols.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& [text, role] = tokens[i];
        if (text.empty())
            throw ValidationError("empty token at index " + std::to_string(i));
        for (char c : text)
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
                throw ValidationError("whitespace in token at index " + std::to_string(i));
        p.symbols.push_back(Symbol{intern(text), role, fresh_instance()});
    }
    return p;
}

bool symbols_match(const Symbol& a, const Symbol& b) {
    return a.type == b.type && a.instance != b.instance;
}

const Pattern& PatternStore::add(Pattern p) {
    for (const auto& q : patterns_)
        if (q.id == p.id) throw ValidationError("duplicate pattern id " + std::to_string(p.id));
    patterns_.push_back(std::move(p));
    return patterns_.back();
}

const Pattern* PatternStore::find(PatternId id) const {
    for (const auto& p : patterns_)
        if (p.id == id) return &p;
    return nullptr;
}

Pattern* PatternStore::find_mut(PatternId id) {
    for (auto& p : patterns_)
        if (p.id == id) return &p;
    return nullptr;
}

bool PatternStore::remove(PatternId id) {
    for (auto it = patterns_.begin(); it != patterns_.end(); ++it)
        if (it->id == id) {
            patterns_.erase(it);
            return true;
        }
    return false;
}

}  // namespace sp
