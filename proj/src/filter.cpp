#include "tablekit/filter.hpp"

#include <algorithm>
#include <cmath>

#include "nll_detail.hpp"

namespace tablekit {

FilterParams::FilterParams(Matrix w1_, std::vector<double> b1_, Matrix w2_,
                           std::vector<double> b2_)
    : w1(std::move(w1_)), b1(std::move(b1_)), w2(std::move(w2_)), b2(std::move(b2_)) {
    if (static_cast<int>(b1.size()) != w1.rows)
        throw std::invalid_argument("filter: b1 length must match w1 rows");
    if (w2.rows != 1 || w2.cols != w1.rows)
        throw std::invalid_argument("filter: w2 must be 1 x hidden");
    if (b2.size() != 1) throw std::invalid_argument("filter: b2 must be a single value");
}

FilterParams FilterParams::zeros(int d, int hidden) {
    if (hidden < 0) hidden = std::max(1, d / 2);
    return FilterParams(Matrix(hidden, d), std::vector<double>(hidden, 0.0), Matrix(1, hidden),
                        std::vector<double>(1, 0.0));
}

namespace {

// Forward pass for one box row; keeps the pre-activation for backprop.
struct Forward {
    std::vector<double> z1;  // hidden pre-activation
    std::vector<double> a1;  // rectified
    double z2 = 0.0;
};

Forward forward_one(const Matrix& boxes, int row, const FilterParams& p) {
    Forward f;
    f.z1.resize(p.hidden());
    f.a1.resize(p.hidden());
    for (int hn = 0; hn < p.hidden(); ++hn) {
        double s = p.b1[hn];
        for (int c = 0; c < boxes.cols; ++c) s += p.w1.at(hn, c) * boxes.at(row, c);
        f.z1[hn] = s;
        f.a1[hn] = std::max(0.0, s);
    }
    f.z2 = p.b2[0];
    for (int hn = 0; hn < p.hidden(); ++hn) f.z2 += p.w2.at(0, hn) * f.a1[hn];
    return f;
}

}  // namespace

std::vector<double> filter_scores(const Matrix& boxes, const FilterParams& params) {
    if (boxes.cols != params.d_in())
        throw std::invalid_argument("filter_scores: box feature dim mismatch");
    std::vector<double> scores;
    scores.reserve(boxes.rows);
    for (int r = 0; r < boxes.rows; ++r)
        scores.push_back(detail::sigmoid(forward_one(boxes, r, params).z2));
    return scores;
}

std::vector<bool> filter_mask(const std::vector<double>& scores) {
    std::vector<bool> mask;
    mask.reserve(scores.size());
    for (double s : scores) mask.push_back(s > 0.5);
    return mask;
}

MaskedBoxes apply_mask(const Matrix& boxes, const CellAnnotations& ann,
                       const std::vector<bool>& mask) {
    if (static_cast<int>(mask.size()) != boxes.rows ||
        mask.size() != ann.boxes.size())
        throw std::invalid_argument("apply_mask: length mismatch");
    MaskedBoxes out;
    int kept = static_cast<int>(std::count(mask.begin(), mask.end(), true));
    out.features = Matrix(kept, boxes.cols);
    int w = 0;
    for (int r = 0; r < boxes.rows; ++r) {
        if (!mask[r]) continue;
        for (int c = 0; c < boxes.cols; ++c) out.features.at(w, c) = boxes.at(r, c);
        out.annotations.boxes.push_back(ann.boxes[r]);
        ++w;
    }
    return out;
}

FilterLoss filter_bce_loss(const Matrix& boxes, const FilterParams& params,
                           const std::vector<bool>& labels) {
    if (static_cast<int>(labels.size()) != boxes.rows)
        throw std::invalid_argument("filter_bce_loss: one label per box required");
    if (boxes.cols != params.d_in())
        throw std::invalid_argument("filter_bce_loss: box feature dim mismatch");
    if (boxes.rows == 0) throw std::invalid_argument("filter_bce_loss: no boxes");

    FilterLoss out;
    out.grad = FilterParams::zeros(params.d_in(), params.hidden());
    const double inv_n = 1.0 / boxes.rows;
    for (int r = 0; r < boxes.rows; ++r) {
        Forward f = forward_one(boxes, r, params);
        double y = labels[r] ? 1.0 : 0.0;
        out.value += (detail::softplus(f.z2) - y * f.z2) * inv_n;
        double dz2 = (detail::sigmoid(f.z2) - y) * inv_n;
        out.grad.b2[0] += dz2;
        for (int hn = 0; hn < params.hidden(); ++hn) {
            out.grad.w2.at(0, hn) += dz2 * f.a1[hn];
            if (f.z1[hn] <= 0.0) continue;  // rectifier gate
            double dz1 = dz2 * params.w2.at(0, hn);
            out.grad.b1[hn] += dz1;
            for (int c = 0; c < boxes.cols; ++c)
                out.grad.w1.at(hn, c) += dz1 * boxes.at(r, c);
        }
    }
    return out;
}

HtmlNode baseline_assemble(const TableGrid& grid, const CellAnnotations& ann,
                           double iou_threshold) {
    ensure_valid(grid);
    // Real boxes per cell, needed to decide which cells a distractor joins.
    std::vector<std::vector<const AnnotatedBox*>> cell_boxes(grid.cell_count());
    for (const AnnotatedBox& box : ann.boxes)
        if (!box.distractor && box.target) cell_boxes[*box.target].push_back(&box);

    std::vector<std::string> cell_text(grid.cell_count());
    std::vector<bool> has_text(grid.cell_count(), false);
    auto append = [&](int cell, const std::string& text) {
        if (has_text[cell]) cell_text[cell] += ' ';
        cell_text[cell] += text;
        has_text[cell] = true;
    };
    for (const AnnotatedBox& box : ann.boxes) {
        if (!box.distractor) {
            if (box.target) append(*box.target, box.text);
            continue;
        }
        for (int cell = 0; cell < grid.cell_count(); ++cell)
            for (const AnnotatedBox* real : cell_boxes[cell])
                if (iou(box.bbox, real->bbox) > iou_threshold) {
                    append(cell, box.text);
                    break;
                }
    }

    TableGrid assembled = grid;
    for (int i = 0; i < assembled.cell_count(); ++i) {
        if (has_text[i]) {
            assembled.cells[i].empty = false;
            assembled.cells[i].content = cell_text[i];
        } else {
            assembled.cells[i].empty = true;
            assembled.cells[i].content.reset();
        }
    }
    return grid_to_html(assembled, true);
}

}  // namespace tablekit
