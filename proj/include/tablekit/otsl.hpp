#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tablekit/table.hpp"

namespace tablekit {

// Table structure token language: C opens a data cell, L extends the cell to
// the left of it, U extends the cell above, X extends both, NL ends a row.
enum class OtslTag { C, L, U, X, NL };

const char* tag_name(OtslTag t);

struct OtslParseError : std::runtime_error {
    // kind is one of: UnknownToken, EmptySequence, RaggedRows, IllegalL,
    // IllegalU, IllegalX
    std::string kind;
    int row;  // grid coordinates of the offending token, -1 when global
    int col;
    OtslParseError(std::string k, int r, int c, const std::string& msg)
        : std::runtime_error(format(k, r, c, msg)), kind(std::move(k)), row(r), col(c) {}

  private:
    static std::string format(const std::string& k, int r, int c, const std::string& msg) {
        std::string out = k;
        if (r >= 0) {
            out += " at (" + std::to_string(r) + ",";
            out += (c >= 0 ? std::to_string(c) : std::string("-")) + ")";
        }
        return out + ": " + msg;
    }
};

struct NonRectangularMerge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A token sequence that satisfies the grammar: ends with NL, rectangular
// rows, and the local neighbor rules for L/U/X. Instances exist only in the
// validated state.
class OtslSequence {
  public:
    static OtslSequence parse(const std::string& text);
    static OtslSequence from_tokens(std::vector<OtslTag> tokens);

    const std::vector<OtslTag>& tokens() const { return tokens_; }
    std::string str() const;  // single line, single-space separated

    int n_rows() const { return n_rows_; }
    int n_cols() const { return n_cols_; }

    bool operator==(const OtslSequence& o) const { return tokens_ == o.tokens_; }

  private:
    OtslSequence(std::vector<OtslTag> tokens, int n_rows, int n_cols)
        : tokens_(std::move(tokens)), n_rows_(n_rows), n_cols_(n_cols) {}

    std::vector<OtslTag> tokens_;
    int n_rows_ = 0;
    int n_cols_ = 0;
};

// Reconstructs the cell tiling; every merge region must come out rectangular.
TableGrid otsl_to_grid(const OtslSequence& seq);

// Row-major encoding of a valid grid; exact inverse of otsl_to_grid on the
// structural fields.
OtslSequence grid_to_otsl(const TableGrid& grid);

// Positions (into the token list) of all C tokens, ascending. These are the
// pointer targets for the data tags.
std::vector<int> data_tag_indices(const OtslSequence& seq);

}  // namespace tablekit
