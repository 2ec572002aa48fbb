#include "tablekit/html.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace tablekit {

int node_count(const HtmlNode& root) {
    int n = 1;
    for (const HtmlNode& c : root.children) n += node_count(c);
    return n;
}

namespace {

std::string escape_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string unescape_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
        if (s[i] == '&') {
            if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
            if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
            if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
            if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
        }
        out += s[i++];
    }
    return out;
}

void emit(const HtmlNode& node, std::string& out) {
    out += '<';
    out += node.tag;
    if (node.colspan > 1) out += " colspan=\"" + std::to_string(node.colspan) + "\"";
    if (node.rowspan > 1) out += " rowspan=\"" + std::to_string(node.rowspan) + "\"";
    out += '>';
    if (node.text) out += escape_text(*node.text);
    for (const HtmlNode& c : node.children) emit(c, out);
    out += "</";
    out += node.tag;
    out += '>';
}

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closed = false;
    std::map<std::string, std::string> attrs;
    size_t pos = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) {}

    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }

    // Text run up to the next tag, entity-unescaped.
    std::string read_text() {
        size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '<') ++pos_;
        return unescape_text(text_.substr(start, pos_ - start));
    }

    Tag read_tag() {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != '<')
            throw HtmlParseError("expected tag", pos_);
        Tag tag;
        tag.pos = pos_;
        ++pos_;
        if (peek() == '/') {
            tag.closing = true;
            ++pos_;
        }
        tag.name = read_name();
        if (tag.name.empty()) throw HtmlParseError("empty tag name", tag.pos);
        while (true) {
            skip_space();
            if (pos_ >= text_.size()) throw HtmlParseError("unterminated tag", tag.pos);
            if (peek() == '>') {
                ++pos_;
                break;
            }
            if (peek() == '/') {
                ++pos_;
                skip_space();
                if (peek() != '>') throw HtmlParseError("malformed self-closing tag", pos_);
                ++pos_;
                tag.self_closed = true;
                break;
            }
            std::string key = read_name();
            if (key.empty()) throw HtmlParseError("malformed attribute", pos_);
            skip_space();
            std::string value;
            if (peek() == '=') {
                ++pos_;
                skip_space();
                char q = peek();
                if (q == '"' || q == '\'') {
                    ++pos_;
                    size_t start = pos_;
                    while (pos_ < text_.size() && text_[pos_] != q) ++pos_;
                    if (pos_ >= text_.size()) throw HtmlParseError("unterminated attribute", start);
                    value = text_.substr(start, pos_ - start);
                    ++pos_;
                } else {
                    size_t start = pos_;
                    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
                           text_[pos_] != '>' && text_[pos_] != '/')
                        ++pos_;
                    value = text_.substr(start, pos_ - start);
                }
            }
            tag.attrs[key] = value;
        }
        return tag;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    size_t pos() const { return pos_; }

  private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string read_name() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        return name;
    }

    const std::string& text_;
    size_t pos_ = 0;
};

int parse_span_attr(const Tag& tag, const char* key) {
    auto it = tag.attrs.find(key);
    if (it == tag.attrs.end()) return 1;
    try {
        int v = std::stoi(it->second);
        if (v < 1) throw HtmlParseError("span attribute must be >= 1", tag.pos);
        return v;
    } catch (const HtmlParseError&) {
        throw;
    } catch (...) {
        throw HtmlParseError("non-numeric span attribute", tag.pos);
    }
}

// td content plus the matching close tag.
HtmlNode parse_td(Lexer& lex, const Tag& open) {
    HtmlNode td;
    td.tag = "td";
    td.colspan = parse_span_attr(open, "colspan");
    td.rowspan = parse_span_attr(open, "rowspan");
    if (open.self_closed) return td;
    std::string content = lex.read_text();
    Tag close = lex.read_tag();
    if (!close.closing || close.name != "td")
        throw HtmlParseError("expected </td>", close.pos);
    bool blank = std::all_of(content.begin(), content.end(),
                             [](unsigned char c) { return std::isspace(c); });
    if (!blank) td.text = content;
    return td;
}

HtmlNode parse_tr(Lexer& lex, const Tag& open) {
    HtmlNode tr;
    tr.tag = "tr";
    if (open.self_closed) return tr;
    while (true) {
        lex.read_text();  // whitespace between cells
        Tag tag = lex.read_tag();
        if (tag.closing) {
            if (tag.name != "tr") throw HtmlParseError("expected </tr>", tag.pos);
            return tr;
        }
        if (tag.name != "td") throw HtmlParseError("unexpected <" + tag.name + "> in row", tag.pos);
        tr.children.push_back(parse_td(lex, tag));
    }
}

}  // namespace

std::string html_to_string(const HtmlNode& root) {
    std::string out;
    emit(root, out);
    return out;
}

HtmlNode parse_html(const std::string& text) {
    Lexer lex(text);
    Tag open = lex.read_tag();
    if (open.closing || open.name != "table")
        throw HtmlParseError("expected <table>", open.pos);
    HtmlNode table;
    table.tag = "table";
    if (open.self_closed) return table;
    // thead/tbody wrappers are accepted and flattened; depth tracks how many
    // section closers remain to consume.
    int section_depth = 0;
    while (true) {
        lex.read_text();
        Tag tag = lex.read_tag();
        if (tag.closing) {
            if (tag.name == "thead" || tag.name == "tbody") {
                if (section_depth == 0)
                    throw HtmlParseError("stray </" + tag.name + ">", tag.pos);
                --section_depth;
                continue;
            }
            if (tag.name != "table") throw HtmlParseError("expected </table>", tag.pos);
            if (section_depth != 0) throw HtmlParseError("unclosed table section", tag.pos);
            break;
        }
        if (tag.name == "thead" || tag.name == "tbody") {
            if (!tag.self_closed) ++section_depth;
            continue;
        }
        if (tag.name != "tr")
            throw HtmlParseError("unexpected <" + tag.name + "> in table", tag.pos);
        table.children.push_back(parse_tr(lex, tag));
    }
    if (!lex.at_end()) throw HtmlParseError("trailing content after </table>", lex.pos());
    return table;
}

HtmlNode grid_to_html(const TableGrid& grid, bool include_content) {
    ensure_valid(grid);
    HtmlNode table;
    table.tag = "table";
    table.children.resize(grid.n_rows);
    for (HtmlNode& tr : table.children) tr.tag = "tr";
    for (const CellSpec& cell : grid.cells) {
        HtmlNode td;
        td.tag = "td";
        td.colspan = cell.colspan;
        td.rowspan = cell.rowspan;
        if (include_content && cell.content) td.text = *cell.content;
        table.children[cell.row].children.push_back(std::move(td));
    }
    return table;
}

TableGrid html_to_grid(const HtmlNode& tree) {
    if (tree.tag != "table")
        throw TableShapeError("RaggedTable", "root must be a table");
    int n_rows = static_cast<int>(tree.children.size());
    if (n_rows == 0) throw TableShapeError("RaggedTable", "table has no rows");

    // Standard carry-over placement: each td lands at the first free column
    // of its row; rowspans keep columns occupied for later rows.
    std::vector<std::vector<int>> occ(n_rows);  // -1 free, else cell index
    TableGrid grid;
    grid.n_rows = n_rows;
    auto column_free = [&](int r, int c) {
        return c >= static_cast<int>(occ[r].size()) || occ[r][c] == -1;
    };
    for (int r = 0; r < n_rows; ++r) {
        const HtmlNode& tr = tree.children[r];
        if (tr.tag != "tr") throw TableShapeError("RaggedTable", "expected tr");
        int col = 0;
        for (const HtmlNode& td : tr.children) {
            if (td.tag != "td") throw TableShapeError("RaggedTable", "expected td");
            while (!column_free(r, col)) ++col;
            if (td.rowspan < 1 || td.colspan < 1)
                throw TableShapeError("OverlappingSpans", "non-positive span");
            if (r + td.rowspan > n_rows)
                throw TableShapeError("OverlappingSpans",
                                      "rowspan exceeds remaining rows at row " + std::to_string(r));
            int cell_index = grid.cell_count();
            for (int rr = r; rr < r + td.rowspan; ++rr) {
                for (int cc = col; cc < col + td.colspan; ++cc) {
                    if (static_cast<int>(occ[rr].size()) <= cc) occ[rr].resize(cc + 1, -1);
                    if (occ[rr][cc] != -1)
                        throw TableShapeError("OverlappingSpans", "overlap at (" +
                                                  std::to_string(rr) + "," + std::to_string(cc) + ")");
                    occ[rr][cc] = cell_index;
                }
            }
            CellSpec cell;
            cell.row = r;
            cell.col = col;
            cell.rowspan = td.rowspan;
            cell.colspan = td.colspan;
            if (td.text) {
                cell.empty = false;
                cell.content = *td.text;
            } else {
                cell.empty = true;
            }
            grid.cells.push_back(std::move(cell));
        }
    }
    size_t n_cols = 0;
    for (const auto& row : occ) n_cols = std::max(n_cols, row.size());
    grid.n_cols = static_cast<int>(n_cols);
    for (int r = 0; r < n_rows; ++r)
        for (int c = 0; c < grid.n_cols; ++c)
            if (column_free(r, c))
                throw TableShapeError(
                    "RaggedTable",
                    "rows imply inconsistent column count; gap at (" + std::to_string(r) + "," +
                        std::to_string(c) + ")");

    // Anchors were appended per row in column order, which is already
    // row-major reading order.
    ensure_valid(grid);
    return grid;
}

}  // namespace tablekit
