#include "sp/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace sp {

namespace {

bool is_comment(const std::string& line, std::size_t first) {
    if (line[first] != '#') return false;
    if (first + 1 == line.size()) return true;
    char next = line[first + 1];
    return next == '#' || std::isspace(static_cast<unsigned char>(next));
}

}  // namespace

Pattern parse_pattern_line(const std::string& line, int line_no) {
    std::vector<std::pair<std::string, Role>> tokens;
    std::uint64_t frequency = 1;
    bool have_frequency = false;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::string tok = line.substr(start, i - start);
        int column = static_cast<int>(start) + 1;
        if (have_frequency) throw ParseError("tokens after frequency", line_no, column);
        if (tok.size() >= 3 && tok.front() == '(' && tok.back() == ')') {
            std::string digits = tok.substr(1, tok.size() - 2);
            bool numeric = !digits.empty();
            for (char c : digits) numeric = numeric && std::isdigit(static_cast<unsigned char>(c));
            if (numeric) {
                frequency = std::stoull(digits);
                if (frequency == 0) throw ParseError("frequency must be positive", line_no, column);
                have_frequency = true;
                continue;
            }
        }
        Role role = Role::C;
        if (tok.size() > 1 && tok.front() == '!') {
            role = Role::ID;
            tok.erase(0, 1);
        }
        tokens.emplace_back(tok, role);
    }
    if (tokens.empty()) throw ParseError("pattern has no symbols", line_no, 1);
    if (tokens.front().first == "<" && tokens.back().first == ">") {
        tokens.front().second = Role::ID;
        tokens.back().second = Role::ID;
    }
    return make_pattern(tokens, frequency);
}

std::vector<Pattern> parse_patterns(std::istream& in) {
    std::vector<Pattern> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (is_comment(line, first)) continue;
        out.push_back(parse_pattern_line(line, line_no));
    }
    return out;
}

std::vector<Pattern> parse_patterns_text(const std::string& text) {
    std::istringstream in(text);
    return parse_patterns(in);
}

std::vector<Pattern> load_patterns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_patterns(in);
}

std::string serialise(const Pattern& p, bool with_frequency) {
    std::string out;
    const bool framed = p.size() >= 2 && p.symbols.front().token() == "<" &&
                        p.symbols.back().token() == ">" && p.symbols.front().is_id() &&
                        p.symbols.back().is_id();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& s = p.symbols[i];
        if (!out.empty()) out += ' ';
        const auto& t = s.token();
        bool frame = framed && (i == 0 || i + 1 == p.size());
        if (s.is_id() && !frame) out += '!';
        out += t;
    }
    if (with_frequency) out += " (" + std::to_string(p.frequency) + ")";
    return out;
}

std::string serialise(const std::vector<Pattern>& ps, bool with_frequency) {
    std::string out;
    for (const auto& p : ps) out += serialise(p, with_frequency) + "\n";
    return out;
}

PatternStore make_store(std::vector<Pattern> ps) {
    PatternStore store;
    for (auto& p : ps) store.add(std::move(p));
    return store;
}

}  // namespace sp
