#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sp/coding.hpp"
#include "sp/core.hpp"
#include "sp/matcher.hpp"

namespace sp {

using PatternPtr = std::shared_ptr<const Pattern>;

struct Cell {
    int row = 0;
    int pos = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

using Column = std::vector<Cell>;  // sorted by row

struct Alignment {
    std::vector<PatternPtr> rows;  // rows[0] is New
    std::vector<Column> columns;

    double bn = 0;
    double be = 0;
    double cd = 0;
    double cr = 0;
    bool scored = false;
    std::vector<Symbol> code;
    std::string key;

    const Pattern& new_pattern() const { return *rows[0]; }
    const Symbol& symbol(const Cell& c) const { return rows[c.row]->symbols[c.pos]; }
    std::size_t old_rows() const { return rows.size() - 1; }
    std::vector<int> new_hits() const;
    int new_cell(const Column& c) const;
    std::string code_text() const;
};

enum class Reject {
    none,
    structure,
    token,
    self_match,
    order,
    projection,
    mismatch,
    bracket,
    new_order,
    disconnected,
    no_hit,
    mirror,
};

const char* reject_name(Reject r);

struct LegalityOptions {
    bool brackets = true;
    bool mirror = false;
};

// Checks every structural constraint on an alignment.
Reject validate(const Alignment& a, const LegalityOptions& opt = {});

// A New-only alignment used as a driving pattern: one column per New symbol.
Alignment new_driver(PatternPtr fresh);
// A single Old pattern appearance with no New hits, used as a target.
Alignment single_row(PatternPtr fresh, PatternPtr old);

std::vector<MatchSymbol> projection_symbols(const Alignment& a);

struct ExtendResult {
    std::optional<Alignment> alignment;
    Reject reason = Reject::none;
};

ExtendResult extend(const Alignment& base, const std::vector<Hit>& hits, const Alignment& target,
                    const LegalityOptions& opt = {});

Pattern project(const Alignment& a);
std::vector<Symbol> derive_code(const Alignment& a);
void score(Alignment& a, const CodeTable& table);
std::string canonical_key(const Alignment& a);
void finalise(Alignment& a, const CodeTable& table);

// CD descending, then fewer rows, then lexicographic code, then key.
bool better(const Alignment& a, const Alignment& b);

std::vector<Alignment> dedupe(std::vector<Alignment> as);

std::string render(const Alignment& a);
std::string render_rotated(const Alignment& a);

// Index of the Old row whose first occupied column is leftmost; ties broken by
// rightmost last column, then lowest row index.
int most_abstract_row(const Alignment& a);

struct Span {
    int first = -1;
    int last = -1;
};
std::vector<Span> row_spans(const Alignment& a);

}  // namespace sp
