#include "tablekit/otsl.hpp"

#include <algorithm>
#include <sstream>

namespace tablekit {

const char* tag_name(OtslTag t) {
    switch (t) {
        case OtslTag::C: return "C";
        case OtslTag::L: return "L";
        case OtslTag::U: return "U";
        case OtslTag::X: return "X";
        case OtslTag::NL: return "NL";
    }
    return "?";
}

namespace {

// Validates the grammar and returns the row/col shape. Local neighbor rules:
//   L: col > 0, left in {C, L}
//   U: row > 0, above in {C, U, X}
//   X: row > 0 and col > 0, left in {U, X}, above in {L, X}
// Global rectangularity of merge regions is checked by otsl_to_grid.
std::pair<int, int> check_tokens(const std::vector<OtslTag>& tokens) {
    if (tokens.empty()) throw OtslParseError("EmptySequence", -1, -1, "empty sequence");
    if (tokens.back() != OtslTag::NL)
        throw OtslParseError("RaggedRows", -1, -1, "sequence does not end with NL");

    std::vector<std::vector<OtslTag>> rows;
    std::vector<OtslTag> current;
    for (OtslTag t : tokens) {
        if (t == OtslTag::NL) {
            rows.push_back(current);
            current.clear();
        } else {
            current.push_back(t);
        }
    }
    // tokens ends with NL, so every cell token landed in a completed row

    int n_cols = static_cast<int>(rows[0].size());
    if (n_cols == 0)
        throw OtslParseError("EmptySequence", 0, -1, "first row has no cell tokens");
    for (size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<int>(rows[r].size()) != n_cols)
            throw OtslParseError("RaggedRows", static_cast<int>(r), -1,
                                 "row " + std::to_string(r) + " has " +
                                     std::to_string(rows[r].size()) + " cells, expected " +
                                     std::to_string(n_cols));
    }

    auto at = [&](int r, int c) { return rows[r][c]; };
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
        for (int c = 0; c < n_cols; ++c) {
            OtslTag t = at(r, c);
            if (t == OtslTag::L) {
                if (c == 0)
                    throw OtslParseError("IllegalL", r, c, "L in column 0");
                OtslTag left = at(r, c - 1);
                if (left != OtslTag::C && left != OtslTag::L)
                    throw OtslParseError("IllegalL", r, c, "L must follow C or L");
            } else if (t == OtslTag::U) {
                if (r == 0)
                    throw OtslParseError("IllegalU", r, c, "U in row 0");
                OtslTag above = at(r - 1, c);
                if (above != OtslTag::C && above != OtslTag::U && above != OtslTag::X)
                    throw OtslParseError("IllegalU", r, c, "U must sit below C, U or X");
            } else if (t == OtslTag::X) {
                if (r == 0 || c == 0)
                    throw OtslParseError("IllegalX", r, c, "X in row 0 or column 0");
                OtslTag left = at(r, c - 1);
                OtslTag above = at(r - 1, c);
                if (left != OtslTag::U && left != OtslTag::X)
                    throw OtslParseError("IllegalX", r, c, "X must follow U or X");
                if (above != OtslTag::L && above != OtslTag::X)
                    throw OtslParseError("IllegalX", r, c, "X must sit below L or X");
            }
        }
    }
    return {static_cast<int>(rows.size()), n_cols};
}

}  // namespace

OtslSequence OtslSequence::parse(const std::string& text) {
    std::vector<OtslTag> tokens;
    std::istringstream in(text);
    std::string word;
    while (in >> word) {
        if (word == "C")
            tokens.push_back(OtslTag::C);
        else if (word == "L")
            tokens.push_back(OtslTag::L);
        else if (word == "U")
            tokens.push_back(OtslTag::U);
        else if (word == "X")
            tokens.push_back(OtslTag::X);
        else if (word == "NL")
            tokens.push_back(OtslTag::NL);
        else {
            // Locate the offending token in grid coordinates.
            int row = 0, col = 0;
            for (OtslTag t : tokens) {
                if (t == OtslTag::NL) {
                    ++row;
                    col = 0;
                } else {
                    ++col;
                }
            }
            throw OtslParseError("UnknownToken", row, col, "unknown token '" + word + "'");
        }
    }
    return from_tokens(std::move(tokens));
}

OtslSequence OtslSequence::from_tokens(std::vector<OtslTag> tokens) {
    auto [n_rows, n_cols] = check_tokens(tokens);
    return OtslSequence(std::move(tokens), n_rows, n_cols);
}

std::string OtslSequence::str() const {
    std::string out;
    for (size_t i = 0; i < tokens_.size(); ++i) {
        if (i) out += ' ';
        out += tag_name(tokens_[i]);
    }
    return out;
}

TableGrid otsl_to_grid(const OtslSequence& seq) {
    int n_rows = seq.n_rows();
    int n_cols = seq.n_cols();
    std::vector<OtslTag> cell_tokens;
    cell_tokens.reserve(static_cast<size_t>(n_rows) * n_cols);
    for (OtslTag t : seq.tokens())
        if (t != OtslTag::NL) cell_tokens.push_back(t);

    auto at = [&](int r, int c) { return cell_tokens[static_cast<size_t>(r) * n_cols + c]; };

    // anchor[r][c] = linear index of the position's region anchor.
    std::vector<int> anchor(static_cast<size_t>(n_rows) * n_cols, -1);
    auto anchor_at = [&](int r, int c) -> int& {
        return anchor[static_cast<size_t>(r) * n_cols + c];
    };
    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < n_cols; ++c) {
            switch (at(r, c)) {
                case OtslTag::C:
                    anchor_at(r, c) = r * n_cols + c;
                    break;
                case OtslTag::L:
                    anchor_at(r, c) = anchor_at(r, c - 1);
                    break;
                case OtslTag::U:
                    anchor_at(r, c) = anchor_at(r - 1, c);
                    break;
                case OtslTag::X: {
                    int left = anchor_at(r, c - 1);
                    int above = anchor_at(r - 1, c);
                    if (left != above)
                        throw NonRectangularMerge("X at (" + std::to_string(r) + "," +
                                                  std::to_string(c) +
                                                  ") joins two different cells");
                    anchor_at(r, c) = left;
                    break;
                }
                case OtslTag::NL:
                    break;  // filtered out above
            }
        }
    }

    // Region extents; each region must tile its bounding rectangle exactly.
    TableGrid grid;
    grid.n_rows = n_rows;
    grid.n_cols = n_cols;
    std::vector<int> max_r(static_cast<size_t>(n_rows) * n_cols, 0);
    std::vector<int> max_c(static_cast<size_t>(n_rows) * n_cols, 0);
    std::vector<int> count(static_cast<size_t>(n_rows) * n_cols, 0);
    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < n_cols; ++c) {
            int a = anchor_at(r, c);
            max_r[a] = std::max(max_r[a], r);
            max_c[a] = std::max(max_c[a], c);
            count[a] += 1;
        }
    }
    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < n_cols; ++c) {
            int linear = r * n_cols + c;
            if (anchor_at(r, c) != linear) continue;  // not an anchor
            CellSpec cell;
            cell.row = r;
            cell.col = c;
            cell.rowspan = max_r[linear] - r + 1;
            cell.colspan = max_c[linear] - c + 1;
            if (count[linear] != cell.rowspan * cell.colspan)
                throw NonRectangularMerge("merge region anchored at (" + std::to_string(r) +
                                          "," + std::to_string(c) + ") is not a rectangle");
            cell.empty = true;  // OTSL carries no emptiness or content
            grid.cells.push_back(std::move(cell));
        }
    }
    ensure_valid(grid);
    return grid;
}

OtslSequence grid_to_otsl(const TableGrid& grid) {
    ensure_valid(grid);
    std::vector<int> occ = grid.occupancy();
    std::vector<OtslTag> tokens;
    tokens.reserve(static_cast<size_t>(grid.n_rows) * (grid.n_cols + 1));
    for (int r = 0; r < grid.n_rows; ++r) {
        for (int c = 0; c < grid.n_cols; ++c) {
            const CellSpec& cell = grid.cells[occ[static_cast<size_t>(r) * grid.n_cols + c]];
            if (cell.row == r && cell.col == c)
                tokens.push_back(OtslTag::C);
            else if (r == cell.row)
                tokens.push_back(OtslTag::L);
            else if (c == cell.col)
                tokens.push_back(OtslTag::U);
            else
                tokens.push_back(OtslTag::X);
        }
        tokens.push_back(OtslTag::NL);
    }
    return OtslSequence::from_tokens(std::move(tokens));
}

std::vector<int> data_tag_indices(const OtslSequence& seq) {
    std::vector<int> indices;
    const auto& tokens = seq.tokens();
    for (size_t i = 0; i < tokens.size(); ++i)
        if (tokens[i] == OtslTag::C) indices.push_back(static_cast<int>(i));
    return indices;
}

}  // namespace tablekit
