#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tablekit {

// Axis-aligned text region box, coordinates normalized to [0,1] relative to
// the page. Zero-area boxes are rejected at construction.
struct BBox {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    BBox() = default;
    BBox(double x_min, double y_min, double x_max, double y_max);

    bool operator==(const BBox&) const = default;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

double iou(const BBox& a, const BBox& b);

// One table cell: anchor position plus spans, reading-order anchored.
// content is present iff the cell is non-empty.
struct CellSpec {
    int row = 0;
    int col = 0;
    int rowspan = 1;
    int colspan = 1;
    bool empty = false;
    std::optional<std::string> content;

    bool operator==(const CellSpec&) const = default;
};

// Rectangular tiling of n_rows x n_cols by cells with spans. Cells are kept
// in reading order of their anchors (row-major).
struct TableGrid {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<CellSpec> cells;

    bool operator==(const TableGrid&) const = default;

    int cell_count() const { return static_cast<int>(cells.size()); }

    // Grid position -> cell index; -1 marks uncovered positions (only
    // possible for invalid grids).
    std::vector<int> occupancy() const;
};

struct GridReport {
    bool ok = true;
    std::vector<std::string> violations;
};

GridReport validate_grid(const TableGrid& grid);

// Throws std::invalid_argument listing the first violation.
void ensure_valid(const TableGrid& grid);

// Cell indices sorted by (anchor row, anchor col); stable.
std::vector<int> reading_order(const TableGrid& grid);

// Structure-only equality: dimensions, anchors and spans; ignores emptiness
// and content.
bool same_structure(const TableGrid& a, const TableGrid& b);

// One text region: geometry, text, and either a target cell (index into the
// companion grid) or a distractor flag, never both.
struct AnnotatedBox {
    BBox bbox;
    std::string text;
    std::optional<int> target;  // cell index, absent for distractors
    bool distractor = false;

    bool operator==(const AnnotatedBox&) const = default;
};

struct CellAnnotations {
    std::vector<AnnotatedBox> boxes;

    bool operator==(const CellAnnotations&) const = default;
};

// Checks annotation invariants against the companion grid.
GridReport validate_annotations(const TableGrid& grid, const CellAnnotations& ann);

// JSON corpus format (field names are part of the format contract).
std::string grid_to_json(const TableGrid& grid);
TableGrid grid_from_json(const std::string& text);
std::string annotations_to_json(const CellAnnotations& ann);
CellAnnotations annotations_from_json(const std::string& text);

}  // namespace tablekit
