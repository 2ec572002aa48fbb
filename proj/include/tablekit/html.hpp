#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tablekit/table.hpp"

namespace tablekit {

// Ordered tree of table markup. Only table/tr/td appear; td carries span
// attributes and optional text content.
struct HtmlNode {
    std::string tag;
    int colspan = 1;
    int rowspan = 1;
    std::optional<std::string> text;
    std::vector<HtmlNode> children;

    bool operator==(const HtmlNode&) const = default;
};

int node_count(const HtmlNode& root);

struct HtmlParseError : std::runtime_error {
    size_t position;
    HtmlParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg), position(pos) {}
};

struct TableShapeError : std::runtime_error {
    // kind is "OverlappingSpans" or "RaggedTable"
    std::string kind;
    TableShapeError(std::string k, const std::string& msg)
        : std::runtime_error(msg), kind(std::move(k)) {}
};

// Emission dialect: no whitespace between tags, double-quoted attributes,
// span attributes only when > 1, every td written as an open/close pair.
std::string html_to_string(const HtmlNode& root);

// Tolerant table-markup parser: accepts the emission dialect plus self-closed
// <td/>, whitespace between tags, single-quoted/unquoted attributes, and
// thead/tbody wrappers (flattened away).
HtmlNode parse_html(const std::string& text);

// One tr per grid row; one td per cell at its anchor row in column order.
// Content is attached iff include_content and the cell is non-empty.
HtmlNode grid_to_html(const TableGrid& grid, bool include_content);

// Inverse of grid_to_html via standard rowspan carry-over placement. A td
// without text becomes an empty cell, so the round trip with
// include_content=true is exact.
TableGrid html_to_grid(const HtmlNode& tree);

}  // namespace tablekit
