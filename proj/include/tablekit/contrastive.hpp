#pragma once

#include <vector>

#include "tablekit/matrix.hpp"
#include "tablekit/pointer.hpp"
#include "tablekit/table.hpp"

namespace tablekit {

enum class SpanAxis { Row, Column };

// Positive sets and span coefficients for the boxes that carry a target
// cell. Distractor boxes do not participate at all; source_box maps each
// participant back to its index in the annotation list. A(j) is implicit:
// every participant except j.
struct ContrastiveSets {
    int n_boxes = 0;
    std::vector<int> source_box;
    std::vector<std::vector<int>> positives;       // per j: indices p (0..n_boxes-1)
    std::vector<std::vector<double>> coefficients; // per j: c_p(j), aligned with positives
};

ContrastiveSets positive_sets(const TableGrid& grid, const CellAnnotations& ann, SpanAxis axis);

// overlap(p,j)^2 / (span(p) * span(j)), where span counts the cell's extent
// on the axis and overlap counts the shared grid lines. The cells must
// overlap on the axis.
double span_coefficient(const CellSpec& p_cell, const CellSpec& j_cell, SpanAxis axis);

struct ContrastiveLoss {
    std::vector<double> per_box;  // L_j; 0 for boxes with an empty positive set
    double mean = 0.0;            // average over boxes with at least one positive
    Matrix grad;                  // w.r.t. the embedding matrix
};

// Span-weighted supervised contrastive loss over the participating box
// embeddings (one row per participant).
ContrastiveLoss span_contrastive_loss(const Matrix& embeddings, const ContrastiveSets& sets,
                                      Temperature tau);

// Same computation with every coefficient forced to 1.
ContrastiveLoss uniform_contrastive_loss(const Matrix& embeddings, const ContrastiveSets& sets,
                                         Temperature tau);

}  // namespace tablekit
