#include "tablekit/table.hpp"

#include <algorithm>
#include <stdexcept>

#include "json_detail.hpp"

namespace tablekit {

BBox::BBox(double x_min, double y_min, double x_max, double y_max)
    : x0(x_min), y0(y_min), x1(x_max), y1(y_max) {
    if (!(x0 < x1) || !(y0 < y1))
        throw std::invalid_argument("degenerate bounding box");
    if (x0 < 0.0 || y0 < 0.0 || x1 > 1.0 || y1 > 1.0)
        throw std::invalid_argument("bounding box outside [0,1]");
}

double iou(const BBox& a, const BBox& b) {
    double ix = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    double iy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    double inter = ix * iy;
    return inter / (a.area() + b.area() - inter);
}

std::vector<int> TableGrid::occupancy() const {
    std::vector<int> occ(static_cast<size_t>(std::max(0, n_rows)) * std::max(0, n_cols), -1);
    for (int i = 0; i < cell_count(); ++i) {
        const CellSpec& c = cells[i];
        for (int r = c.row; r < c.row + c.rowspan; ++r) {
            for (int k = c.col; k < c.col + c.colspan; ++k) {
                if (r < 0 || r >= n_rows || k < 0 || k >= n_cols) continue;
                int& slot = occ[static_cast<size_t>(r) * n_cols + k];
                if (slot == -1) slot = i;  // first claim wins; overlaps surface in validate
            }
        }
    }
    return occ;
}

GridReport validate_grid(const TableGrid& grid) {
    GridReport report;
    auto flag = [&](std::string msg) {
        report.ok = false;
        report.violations.push_back(std::move(msg));
    };

    if (grid.n_rows < 1) flag("n_rows must be positive");
    if (grid.n_cols < 1) flag("n_cols must be positive");
    if (!report.ok) return report;

    for (int i = 0; i < grid.cell_count(); ++i) {
        const CellSpec& c = grid.cells[i];
        if (c.rowspan < 1 || c.colspan < 1)
            flag("cell " + std::to_string(i) + " has non-positive span");
        if (c.row < 0 || c.col < 0 || c.row + c.rowspan > grid.n_rows ||
            c.col + c.colspan > grid.n_cols)
            flag("cell " + std::to_string(i) + " exceeds grid bounds at (" +
                 std::to_string(c.row) + "," + std::to_string(c.col) + ")");
        if (c.empty == c.content.has_value())
            flag("cell " + std::to_string(i) + " content must be present iff non-empty");
    }
    if (!report.ok) return report;

    // Tiling: every position covered exactly once.
    std::vector<int> claims(static_cast<size_t>(grid.n_rows) * grid.n_cols, 0);
    for (const CellSpec& c : grid.cells)
        for (int r = c.row; r < c.row + c.rowspan; ++r)
            for (int k = c.col; k < c.col + c.colspan; ++k)
                claims[static_cast<size_t>(r) * grid.n_cols + k] += 1;
    for (int r = 0; r < grid.n_rows; ++r) {
        for (int k = 0; k < grid.n_cols; ++k) {
            int n = claims[static_cast<size_t>(r) * grid.n_cols + k];
            if (n == 0)
                flag("gap at (" + std::to_string(r) + "," + std::to_string(k) + ")");
            else if (n > 1)
                flag("overlap at (" + std::to_string(r) + "," + std::to_string(k) + ")");
        }
    }

    for (int i = 1; i < grid.cell_count(); ++i) {
        const CellSpec& a = grid.cells[i - 1];
        const CellSpec& b = grid.cells[i];
        if (a.row > b.row || (a.row == b.row && a.col >= b.col)) {
            flag("cells out of reading order at index " + std::to_string(i));
            break;
        }
    }
    return report;
}

void ensure_valid(const TableGrid& grid) {
    GridReport report = validate_grid(grid);
    if (!report.ok) throw std::invalid_argument("invalid grid: " + report.violations.front());
}

std::vector<int> reading_order(const TableGrid& grid) {
    ensure_valid(grid);
    std::vector<int> order(grid.cells.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const CellSpec& ca = grid.cells[a];
        const CellSpec& cb = grid.cells[b];
        return ca.row != cb.row ? ca.row < cb.row : ca.col < cb.col;
    });
    return order;
}

bool same_structure(const TableGrid& a, const TableGrid& b) {
    if (a.n_rows != b.n_rows || a.n_cols != b.n_cols || a.cells.size() != b.cells.size())
        return false;
    for (size_t i = 0; i < a.cells.size(); ++i) {
        const CellSpec& ca = a.cells[i];
        const CellSpec& cb = b.cells[i];
        if (ca.row != cb.row || ca.col != cb.col || ca.rowspan != cb.rowspan ||
            ca.colspan != cb.colspan)
            return false;
    }
    return true;
}

GridReport validate_annotations(const TableGrid& grid, const CellAnnotations& ann) {
    GridReport report;
    auto flag = [&](std::string msg) {
        report.ok = false;
        report.violations.push_back(std::move(msg));
    };
    for (size_t i = 0; i < ann.boxes.size(); ++i) {
        const AnnotatedBox& box = ann.boxes[i];
        if (box.distractor == box.target.has_value()) {
            flag("box " + std::to_string(i) + " must have a target xor be a distractor");
            continue;
        }
        if (box.target) {
            int t = *box.target;
            if (t < 0 || t >= grid.cell_count())
                flag("box " + std::to_string(i) + " targets missing cell " + std::to_string(t));
            else if (grid.cells[t].empty)
                flag("box " + std::to_string(i) + " targets empty cell " + std::to_string(t));
        }
    }
    return report;
}

std::string grid_to_json(const TableGrid& grid) { return detail::grid_json(grid).dump(); }

TableGrid grid_from_json(const std::string& text) {
    return detail::grid_from(nlohmann::json::parse(text));
}

std::string annotations_to_json(const CellAnnotations& ann) {
    return detail::annotations_json(ann).dump();
}

CellAnnotations annotations_from_json(const std::string& text) {
    return detail::annotations_from(nlohmann::json::parse(text));
}

}  // namespace tablekit
