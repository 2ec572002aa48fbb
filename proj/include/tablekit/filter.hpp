#pragma once

#include <vector>

#include "tablekit/html.hpp"
#include "tablekit/matrix.hpp"
#include "tablekit/table.hpp"

namespace tablekit {

// Two-layer rectifier network scoring each box embedding as keep/drop.
struct FilterParams {
    Matrix w1;                // hidden x d
    std::vector<double> b1;   // hidden
    Matrix w2;                // 1 x hidden
    std::vector<double> b2;   // 1

    FilterParams() = default;
    FilterParams(Matrix w1_, std::vector<double> b1_, Matrix w2_, std::vector<double> b2_);

    int d_in() const { return w1.cols; }
    int hidden() const { return w1.rows; }

    // hidden < 0 picks the default width d/2 (at least 1).
    static FilterParams zeros(int d, int hidden = -1);
};

// sigma(w2 . relu(w1 x + b1) + b2) per box row.
std::vector<double> filter_scores(const Matrix& boxes, const FilterParams& params);

// Strict > 0.5 threshold.
std::vector<bool> filter_mask(const std::vector<double>& scores);

struct MaskedBoxes {
    Matrix features;
    CellAnnotations annotations;
};

// Order-preserving subselection of rows and annotation boxes.
MaskedBoxes apply_mask(const Matrix& boxes, const CellAnnotations& ann,
                       const std::vector<bool>& mask);

struct FilterLoss {
    double value = 0.0;
    FilterParams grad;  // same shapes as the parameters
};

// Mean binary cross-entropy of the scores against the is-real-box labels,
// with analytic gradients through both layers.
FilterLoss filter_bce_loss(const Matrix& boxes, const FilterParams& params,
                           const std::vector<bool>& labels);

// Error-free-structure baseline: every real box contributes its text to its
// target cell; a distractor's text joins every cell owning a box whose IOU
// with it exceeds the threshold (greedy 0.0, selective 0.5).
HtmlNode baseline_assemble(const TableGrid& grid, const CellAnnotations& ann,
                           double iou_threshold);

}  // namespace tablekit
