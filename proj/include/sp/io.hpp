#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sp/core.hpp"

namespace sp {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column)
        : std::runtime_error(what), line(line), column(column) {}
    int line;
    int column;
};

// One pattern per line: whitespace-separated tokens, "!" marks an ID-symbol,
// an optional trailing "(N)" gives the frequency. A line whose first token is a
// bare "#" (or starts with "##") is a comment.
std::vector<Pattern> parse_patterns(std::istream& in);
std::vector<Pattern> parse_patterns_text(const std::string& text);
std::vector<Pattern> load_patterns(const std::string& path);

Pattern parse_pattern_line(const std::string& line, int line_no = 1);

std::string serialise(const Pattern& p, bool with_frequency = true);
std::string serialise(const std::vector<Pattern>& ps, bool with_frequency = true);

PatternStore make_store(std::vector<Pattern> ps);

}  // namespace sp
