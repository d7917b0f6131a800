#include "sp/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sp {

const char* reject_name(Reject r) {
    switch (r) {
        case Reject::none: return "none";
        case Reject::structure: return "structure";
        case Reject::token: return "token";
        case Reject::self_match: return "self-match";
        case Reject::order: return "order";
        case Reject::projection: return "projection";
        case Reject::mismatch: return "mismatch";
        case Reject::bracket: return "bracket";
        case Reject::new_order: return "new-order";
        case Reject::disconnected: return "disconnected";
        case Reject::no_hit: return "no-hit";
        case Reject::mirror: return "mirror";
    }
    return "?";
}

std::vector<int> Alignment::new_hits() const {
    std::vector<int> out;
    for (const auto& col : columns)
        if (!col.empty() && col.front().row == 0) out.push_back(col.front().pos);
    std::sort(out.begin(), out.end());
    return out;
}

int Alignment::new_cell(const Column& c) const {
    return !c.empty() && c.front().row == 0 ? c.front().pos : -1;
}

std::string Alignment::code_text() const {
    std::string out;
    for (const auto& s : code) {
        if (!out.empty()) out += ' ';
        out += s.token();
    }
    return out;
}

namespace {

std::vector<int> bracket_partners(const Pattern& p) {
    static const TokenId open = intern("<");
    static const TokenId close = intern(">");
    std::vector<int> partner(p.size(), -1);
    std::vector<int> stack;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.symbols[i].type == open) {
            stack.push_back(static_cast<int>(i));
        } else if (p.symbols[i].type == close && !stack.empty()) {
            partner[i] = stack.back();
            partner[stack.back()] = static_cast<int>(i);
            stack.pop_back();
        }
    }
    return partner;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Reject validate(const Alignment& a, const LegalityOptions& opt) {
    const std::size_t nrows = a.rows.size();
    if (nrows < 2) return Reject::structure;
    std::vector<std::vector<int>> col_of(nrows);
    for (std::size_t r = 0; r < nrows; ++r) col_of[r].assign(a.rows[r]->size(), -1);
    std::vector<int> last(nrows, -1);

    for (std::size_t c = 0; c < a.columns.size(); ++c) {
        const Column& col = a.columns[c];
        if (col.empty()) return Reject::structure;
        bool has_old = false;
        for (std::size_t k = 0; k < col.size(); ++k) {
            const Cell& cell = col[k];
            if (cell.row < 0 || cell.row >= static_cast<int>(nrows)) return Reject::structure;
            if (cell.pos < 0 || cell.pos >= static_cast<int>(a.rows[cell.row]->size()))
                return Reject::structure;
            if (k > 0 && col[k - 1].row >= cell.row) return Reject::structure;
            if (cell.row != 0) has_old = true;
            if (a.symbol(cell).type != a.symbol(col[0]).type) return Reject::token;
            for (std::size_t m = 0; m < k; ++m)
                if (a.symbol(col[m]).instance == a.symbol(cell).instance) return Reject::self_match;
            if (col_of[cell.row][cell.pos] != -1) return Reject::structure;
            col_of[cell.row][cell.pos] = static_cast<int>(c);
            if (cell.pos <= last[cell.row]) return cell.row == 0 ? Reject::new_order : Reject::order;
            last[cell.row] = cell.pos;
        }
        if (!has_old) return Reject::structure;
    }
    for (std::size_t r = 1; r < nrows; ++r)
        for (int c : col_of[r])
            if (c < 0) return Reject::structure;
    if (a.new_hits().empty()) return Reject::no_hit;

    for (std::size_t c = 0; c + 1 < a.columns.size(); ++c) {
        const Column& x = a.columns[c];
        const Column& y = a.columns[c + 1];
        bool shared = false;
        for (const auto& cx : x)
            for (const auto& cy : y)
                if (cx.row == cy.row) shared = true;
        if (!shared) return Reject::projection;
    }

    for (std::size_t ra = 1; ra < nrows; ++ra)
        for (std::size_t rb = ra + 1; rb < nrows; ++rb) {
            bool shared = false, a_since = false, b_since = false;
            for (const auto& col : a.columns) {
                bool in_a = false, in_b = false;
                for (const auto& cell : col) {
                    if (cell.row == static_cast<int>(ra)) in_a = true;
                    if (cell.row == static_cast<int>(rb)) in_b = true;
                }
                if (in_a && in_b) {
                    if (a_since && b_since) return Reject::mismatch;
                    shared = true;
                    a_since = b_since = false;
                } else if (col.size() == 1) {
                    a_since = a_since || in_a;
                    b_since = b_since || in_b;
                }
            }
            if (shared && a_since && b_since) return Reject::mismatch;
        }

    UnionFind uf(nrows);
    for (const auto& col : a.columns) {
        int first_old = -1;
        for (const auto& cell : col) {
            if (cell.row == 0) continue;
            if (first_old < 0) first_old = cell.row;
            else uf.unite(first_old, cell.row);
        }
    }
    for (std::size_t r = 2; r < nrows; ++r)
        if (uf.find(static_cast<int>(r)) != uf.find(1)) return Reject::disconnected;

    if (opt.brackets) {
        std::vector<std::vector<int>> partners(nrows);
        for (std::size_t r = 1; r < nrows; ++r) partners[r] = bracket_partners(*a.rows[r]);
        for (const auto& col : a.columns) {
            for (std::size_t i = 0; i < col.size(); ++i) {
                if (col[i].row == 0) continue;
                int pi = partners[col[i].row][col[i].pos];
                if (pi < 0) continue;
                for (std::size_t j = i + 1; j < col.size(); ++j) {
                    int pj = partners[col[j].row][col[j].pos];
                    if (pj < 0) continue;
                    if (col_of[col[i].row][pi] != col_of[col[j].row][pj]) return Reject::bracket;
                }
            }
        }
    }

    if (opt.mirror && a.rows[0]->id != 0) {
        for (const auto& col : a.columns) {
            int np = a.new_cell(col);
            if (np < 0) continue;
            for (const auto& cell : col) {
                const Pattern& p = *a.rows[cell.row];
                if (cell.row == 0 || p.copy_of != a.rows[0]->id) continue;
                if (cell.pos - p.copy_offset >= np) return Reject::mirror;
            }
        }
    }
    return Reject::none;
}

Alignment new_driver(PatternPtr fresh) {
    Alignment a;
    a.rows.push_back(fresh);
    for (std::size_t i = 0; i < fresh->size(); ++i) a.columns.push_back({Cell{0, static_cast<int>(i)}});
    return a;
}

Alignment single_row(PatternPtr fresh, PatternPtr old) {
    Alignment a;
    a.rows.push_back(std::move(fresh));
    a.rows.push_back(old);
    for (std::size_t i = 0; i < old->size(); ++i) a.columns.push_back({Cell{1, static_cast<int>(i)}});
    return a;
}

std::vector<MatchSymbol> projection_symbols(const Alignment& a) {
    std::vector<MatchSymbol> out;
    out.reserve(a.columns.size());
    const PatternId new_id = a.rows[0]->id;
    for (const auto& col : a.columns) {
        MatchSymbol m;
        m.type = a.symbol(col[0]).type;
        m.role = Role::ID;
        for (const auto& cell : col) {
            const Symbol& s = a.symbol(cell);
            if (s.role == Role::C) m.role = Role::C;
            m.derivation.push_back(s.instance);
            if (cell.row == 0) {
                m.new_pos = cell.pos;
            } else {
                const Pattern& p = *a.rows[cell.row];
                if (p.copy_of != 0 && p.copy_of == new_id) m.copy_index = cell.pos - p.copy_offset;
            }
        }
        std::sort(m.derivation.begin(), m.derivation.end());
        out.push_back(std::move(m));
    }
    return out;
}

ExtendResult extend(const Alignment& base, const std::vector<Hit>& hits, const Alignment& target,
                    const LegalityOptions& opt) {
    ExtendResult res;
    if (base.rows[0]->id != target.rows[0]->id || hits.empty()) {
        res.reason = Reject::structure;
        return res;
    }
    const int nd = static_cast<int>(base.columns.size());
    const int nt = static_cast<int>(target.columns.size());
    const int row_shift = static_cast<int>(base.rows.size()) - 1;

    std::vector<Column> nodes(base.columns.begin(), base.columns.end());
    std::vector<int> tnode(nt, -1);
    for (const auto& h : hits) {
        if (h.driving_pos < 0 || h.driving_pos >= nd || h.target_pos < 0 || h.target_pos >= nt) {
            res.reason = Reject::structure;
            return res;
        }
        tnode[h.target_pos] = h.driving_pos;
    }
    for (int j = 0; j < nt; ++j) {
        if (tnode[j] < 0) {
            tnode[j] = static_cast<int>(nodes.size());
            nodes.emplace_back();
        }
        for (const auto& cell : target.columns[j])
            nodes[tnode[j]].push_back(Cell{cell.row == 0 ? 0 : cell.row + row_shift, cell.pos});
    }

    const int n = static_cast<int>(nodes.size());
    std::vector<char> keep(n, 0);
    for (int i = 0; i < n; ++i) {
        std::sort(nodes[i].begin(), nodes[i].end(),
                  [](const Cell& x, const Cell& y) { return x.row < y.row; });
        for (const auto& cell : nodes[i])
            if (cell.row != 0) keep[i] = 1;
    }

    std::vector<std::vector<int>> succ(n);
    std::vector<int> indeg(n, 0);
    auto edge = [&](int x, int y) {
        succ[x].push_back(y);
        ++indeg[y];
    };
    int prev = -1;
    for (int i = 0; i < nd; ++i) {
        if (!keep[i]) continue;
        if (prev >= 0) edge(prev, i);
        prev = i;
    }
    prev = -1;
    for (int j = 0; j < nt; ++j) {
        if (prev >= 0 && prev != tnode[j]) edge(prev, tnode[j]);
        prev = tnode[j];
    }
    std::vector<std::pair<int, int>> new_nodes;
    for (int i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        int new_cells = 0;
        for (const auto& cell : nodes[i])
            if (cell.row == 0) {
                new_nodes.emplace_back(cell.pos, i);
                ++new_cells;
            }
        if (new_cells > 1) {
            res.reason = Reject::self_match;
            return res;
        }
    }
    std::sort(new_nodes.begin(), new_nodes.end());
    for (std::size_t k = 1; k < new_nodes.size(); ++k) {
        if (new_nodes[k].first == new_nodes[k - 1].first) {
            res.reason = Reject::self_match;
            return res;
        }
        edge(new_nodes[k - 1].second, new_nodes[k].second);
    }

    std::vector<int> ready;
    int live = 0;
    for (int i = 0; i < n; ++i)
        if (keep[i]) {
            ++live;
            if (indeg[i] == 0) ready.push_back(i);
        }
    Alignment out;
    out.rows = base.rows;
    for (std::size_t r = 1; r < target.rows.size(); ++r) out.rows.push_back(target.rows[r]);
    while (!ready.empty()) {
        if (ready.size() > 1) {
            res.reason = Reject::projection;
            return res;
        }
        int x = ready.back();
        ready.pop_back();
        out.columns.push_back(std::move(nodes[x]));
        for (int y : succ[x])
            if (--indeg[y] == 0) ready.push_back(y);
    }
    if (static_cast<int>(out.columns.size()) != live) {
        res.reason = Reject::order;
        return res;
    }
    res.reason = validate(out, opt);
    if (res.reason == Reject::none) res.alignment = std::move(out);
    return res;
}

Pattern project(const Alignment& a) {
    Pattern p;
    p.id = 0;
    p.frequency = 1;
    for (const auto& col : a.columns) {
        const Cell* pick = nullptr;
        for (const auto& cell : col)
            if (cell.row != 0) {
                pick = &cell;
                break;
            }
        if (!pick) pick = &col[0];
        Symbol s = a.symbol(*pick);
        for (const auto& cell : col)
            if (a.symbol(cell).role == Role::C) s.role = Role::C;
        p.symbols.push_back(s);
    }
    return p;
}

std::vector<Symbol> derive_code(const Alignment& a) {
    std::vector<Symbol> code;
    for (const auto& col : a.columns)
        if (col.size() == 1 && a.symbol(col[0]).is_id()) code.push_back(a.symbol(col[0]));
    return code;
}

void score(Alignment& a, const CodeTable& table) {
    a.bn = 0;
    for (const auto& col : a.columns)
        if (col.front().row == 0) a.bn += table.new_bits(a.symbol(col.front()).type);
    a.code = derive_code(a);
    a.be = 0;
    for (const auto& s : a.code) a.be += table.bits(s.type);
    a.cd = a.bn - a.be;
    a.cr = a.be > 0 ? a.bn / a.be : 0;
    a.scored = true;
}

std::string canonical_key(const Alignment& a) {
    const std::size_t nrows = a.rows.size();
    std::vector<int> first(nrows, -1);
    for (std::size_t c = 0; c < a.columns.size(); ++c)
        for (const auto& cell : a.columns[c])
            if (first[cell.row] < 0) first[cell.row] = static_cast<int>(c);
    std::vector<int> order(nrows);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin() + 1, order.end(), [&](int x, int y) {
        if (a.rows[x]->id != a.rows[y]->id) return a.rows[x]->id < a.rows[y]->id;
        return first[x] < first[y];
    });
    std::vector<int> canon(nrows);
    for (std::size_t i = 0; i < nrows; ++i) canon[order[i]] = static_cast<int>(i);
    std::ostringstream os;
    for (std::size_t i = 1; i < nrows; ++i) os << a.rows[order[i]]->id << ',';
    os << '|';
    for (const auto& col : a.columns) {
        std::vector<std::pair<int, int>> cells;
        for (const auto& cell : col) cells.emplace_back(canon[cell.row], cell.pos);
        std::sort(cells.begin(), cells.end());
        for (const auto& [r, p] : cells) os << r << ':' << p << ' ';
        os << ';';
    }
    return os.str();
}

void finalise(Alignment& a, const CodeTable& table) {
    score(a, table);
    a.key = canonical_key(a);
}

bool better(const Alignment& a, const Alignment& b) {
    if (std::fabs(a.cd - b.cd) > 1e-9) return a.cd > b.cd;
    if (a.rows.size() != b.rows.size()) return a.rows.size() < b.rows.size();
    std::string ca = a.code_text(), cb = b.code_text();
    if (ca != cb) return ca < cb;
    return a.key < b.key;
}

std::vector<Alignment> dedupe(std::vector<Alignment> as) {
    std::vector<Alignment> out;
    std::vector<std::string> seen;
    for (auto& a : as) {
        std::string k = a.key.empty() ? canonical_key(a) : a.key;
        if (std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
        seen.push_back(k);
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<Span> row_spans(const Alignment& a) {
    std::vector<Span> spans(a.rows.size());
    for (std::size_t c = 0; c < a.columns.size(); ++c)
        for (const auto& cell : a.columns[c]) {
            auto& s = spans[cell.row];
            if (s.first < 0) s.first = static_cast<int>(c);
            s.last = static_cast<int>(c);
        }
    return spans;
}

int most_abstract_row(const Alignment& a) {
    auto spans = row_spans(a);
    int best = -1;
    for (std::size_t r = 1; r < a.rows.size(); ++r) {
        if (best < 0) {
            best = static_cast<int>(r);
            continue;
        }
        const Span& s = spans[r];
        const Span& b = spans[best];
        if (s.first < b.first || (s.first == b.first && s.last > b.last)) best = static_cast<int>(r);
    }
    return best;
}

namespace {

struct RenderColumn {
    int column = -1;
    int new_pos = -1;
};

std::vector<RenderColumn> render_columns(const Alignment& a) {
    std::vector<RenderColumn> out;
    auto hits = a.new_hits();
    std::vector<char> hit(a.rows[0]->size(), 0);
    for (int h : hits) hit[h] = 1;
    int next_new = 0;
    auto flush = [&](int upto) {
        for (; next_new < upto; ++next_new)
            if (!hit[next_new]) out.push_back(RenderColumn{-1, next_new});
    };
    for (std::size_t c = 0; c < a.columns.size(); ++c) {
        int np = a.new_cell(a.columns[c]);
        if (np >= 0) {
            flush(np);
            next_new = np + 1;
        }
        out.push_back(RenderColumn{static_cast<int>(c), -1});
    }
    flush(static_cast<int>(a.rows[0]->size()));
    return out;
}

const std::string* cell_text(const Alignment& a, const RenderColumn& rc, int row) {
    if (rc.column < 0) return row == 0 ? &a.rows[0]->symbols[rc.new_pos].token() : nullptr;
    for (const auto& cell : a.columns[rc.column])
        if (cell.row == row) return &a.symbol(cell).token();
    return nullptr;
}

}  // namespace

std::string render(const Alignment& a) {
    auto rcs = render_columns(a);
    const int nrows = static_cast<int>(a.rows.size());
    std::vector<std::size_t> width(rcs.size(), 1);
    for (std::size_t k = 0; k < rcs.size(); ++k)
        for (int r = 0; r < nrows; ++r)
            if (auto t = cell_text(a, rcs[k], r)) width[k] = std::max(width[k], t->size());
    std::string label_pad(std::to_string(nrows - 1).size(), ' ');
    auto label = [&](int r) {
        std::string s = std::to_string(r);
        return s + std::string(label_pad.size() - s.size(), ' ');
    };
    auto trim = [](std::string s) {
        while (!s.empty() && s.back() == ' ') s.pop_back();
        return s;
    };
    std::ostringstream os;
    for (int r = 0; r < nrows; ++r) {
        std::string line = label(r);
        for (std::size_t k = 0; k < rcs.size(); ++k) {
            line += ' ';
            auto t = cell_text(a, rcs[k], r);
            std::string s = t ? *t : "";
            line += s + std::string(width[k] - s.size(), ' ');
        }
        line += ' ' + std::to_string(r);
        os << line << '\n';
        if (r + 1 == nrows) break;
        std::string conn = label_pad;
        bool any = false;
        for (std::size_t k = 0; k < rcs.size(); ++k) {
            conn += ' ';
            bool above = false, below = false;
            if (rcs[k].column >= 0)
                for (const auto& cell : a.columns[rcs[k].column]) {
                    if (cell.row <= r) above = true;
                    if (cell.row > r) below = true;
                }
            std::string s(width[k], ' ');
            if (above && below) {
                s[width[k] / 2] = '|';
                any = true;
            }
            conn += s;
        }
        if (any) os << trim(conn) << '\n';
    }
    return os.str();
}

std::string render_rotated(const Alignment& a) {
    auto rcs = render_columns(a);
    const int nrows = static_cast<int>(a.rows.size());
    std::vector<std::size_t> width(nrows, 1);
    for (int r = 0; r < nrows; ++r) {
        width[r] = std::max(width[r], std::to_string(r).size());
        for (const auto& rc : rcs)
            if (auto t = cell_text(a, rc, r)) width[r] = std::max(width[r], t->size());
    }
    std::ostringstream os;
    std::string header;
    for (int r = 0; r < nrows; ++r) {
        std::string s = std::to_string(r);
        header += s + std::string(width[r] - s.size() + 1, ' ');
    }
    while (!header.empty() && header.back() == ' ') header.pop_back();
    os << header << "\n\n";
    for (const auto& rc : rcs) {
        std::string line;
        int first = -1, last = -1;
        for (int r = 0; r < nrows; ++r)
            if (cell_text(a, rc, r)) {
                if (first < 0) first = r;
                last = r;
            }
        for (int r = 0; r < nrows; ++r) {
            auto t = cell_text(a, rc, r);
            char fill = (r >= first && r < last) ? '-' : ' ';
            std::string s = t ? *t + ' ' : std::string();
            if (t && r < last) s.back() = ' ';
            std::string field = t ? *t : std::string();
            field += std::string(width[r] - field.size() + 1, (r >= first && r < last) ? fill : ' ');
            if (t && r < last) field[t->size()] = ' ';
            line += field;
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        os << line << '\n';
    }
    os << '\n' << header << '\n';
    return os.str();
}

}  // namespace sp
