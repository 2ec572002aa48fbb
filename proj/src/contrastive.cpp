#include "tablekit/contrastive.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace tablekit {

namespace {

// Half-open interval of the cell on the given axis.
std::pair<int, int> axis_interval(const CellSpec& cell, SpanAxis axis) {
    return axis == SpanAxis::Row ? std::pair{cell.row, cell.row + cell.rowspan}
                                 : std::pair{cell.col, cell.col + cell.colspan};
}

int axis_overlap(const CellSpec& a, const CellSpec& b, SpanAxis axis) {
    auto [a0, a1] = axis_interval(a, axis);
    auto [b0, b1] = axis_interval(b, axis);
    return std::min(a1, b1) - std::max(a0, b0);
}

}  // namespace

double span_coefficient(const CellSpec& p_cell, const CellSpec& j_cell, SpanAxis axis) {
    int overlap = axis_overlap(p_cell, j_cell, axis);
    if (overlap < 1)
        throw std::invalid_argument("span_coefficient: cells do not overlap on the axis");
    int span_p = axis == SpanAxis::Row ? p_cell.rowspan : p_cell.colspan;
    int span_j = axis == SpanAxis::Row ? j_cell.rowspan : j_cell.colspan;
    return static_cast<double>(overlap) * overlap / (static_cast<double>(span_p) * span_j);
}

ContrastiveSets positive_sets(const TableGrid& grid, const CellAnnotations& ann, SpanAxis axis) {
    ensure_valid(grid);
    ContrastiveSets sets;
    for (size_t i = 0; i < ann.boxes.size(); ++i) {
        const AnnotatedBox& box = ann.boxes[i];
        if (box.distractor) continue;
        if (!box.target)
            throw std::invalid_argument("positive_sets: unlabeled box " + std::to_string(i));
        if (*box.target < 0 || *box.target >= grid.cell_count())
            throw std::invalid_argument("positive_sets: box " + std::to_string(i) +
                                        " targets missing cell");
        sets.source_box.push_back(static_cast<int>(i));
    }
    sets.n_boxes = static_cast<int>(sets.source_box.size());
    sets.positives.resize(sets.n_boxes);
    sets.coefficients.resize(sets.n_boxes);
    for (int j = 0; j < sets.n_boxes; ++j) {
        const CellSpec& cj = grid.cells[*ann.boxes[sets.source_box[j]].target];
        for (int p = 0; p < sets.n_boxes; ++p) {
            if (p == j) continue;
            const CellSpec& cp = grid.cells[*ann.boxes[sets.source_box[p]].target];
            if (axis_overlap(cp, cj, axis) >= 1) {
                sets.positives[j].push_back(p);
                sets.coefficients[j].push_back(span_coefficient(cp, cj, axis));
            }
        }
    }
    return sets;
}

namespace {

ContrastiveLoss contrastive_core(const Matrix& emb, const ContrastiveSets& sets,
                                 Temperature tau, bool uniform) {
    const int n = sets.n_boxes;
    if (emb.rows != n)
        throw std::invalid_argument("contrastive loss: one embedding row per participating box");
    ContrastiveLoss out;
    out.per_box.assign(n, 0.0);
    out.grad = Matrix(n, emb.cols, 0.0);

    // Pairwise scaled dots.
    Matrix s(n, n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < n; ++a)
            if (a != j) s.at(j, a) = dot_rows(emb, j, emb, a) / tau.tau;

    int included = 0;
    for (int j = 0; j < n; ++j)
        if (!sets.positives[j].empty()) ++included;
    if (included == 0) return out;  // every positive set empty: aggregate 0

    for (int j = 0; j < n; ++j) {
        if (sets.positives[j].empty()) continue;
        assert(n > 1);  // positives exist, so A(j) cannot be empty

        double peak = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < n; ++a)
            if (a != j) peak = std::max(peak, s.at(j, a));
        double z = 0.0;
        for (int a = 0; a < n; ++a)
            if (a != j) z += std::exp(s.at(j, a) - peak);
        double log_z = peak + std::log(z);

        double coeff_sum = 0.0;
        for (size_t i = 0; i < sets.positives[j].size(); ++i)
            coeff_sum += uniform ? 1.0 : sets.coefficients[j][i];

        double loss_j = 0.0;
        std::vector<double> weight(n, 0.0);  // c_p / sum over P(j), zero off P(j)
        for (size_t i = 0; i < sets.positives[j].size(); ++i) {
            int p = sets.positives[j][i];
            double w = (uniform ? 1.0 : sets.coefficients[j][i]) / coeff_sum;
            weight[p] += w;
            loss_j -= w * (s.at(j, p) - log_z);
        }
        out.per_box[j] = loss_j;
        out.mean += loss_j;

        // d loss_j / d s_ja = (softmax_j(a) - weight[a]) / tau, chained into
        // both endpoints of each dot product.
        double scale = 1.0 / (included * tau.tau);
        for (int a = 0; a < n; ++a) {
            if (a == j) continue;
            double g = (std::exp(s.at(j, a) - log_z) - weight[a]) * scale;
            for (int c = 0; c < emb.cols; ++c) {
                out.grad.at(j, c) += g * emb.at(a, c);
                out.grad.at(a, c) += g * emb.at(j, c);
            }
        }
    }
    out.mean /= included;
    return out;
}

}  // namespace

ContrastiveLoss span_contrastive_loss(const Matrix& embeddings, const ContrastiveSets& sets,
                                      Temperature tau) {
    return contrastive_core(embeddings, sets, tau, false);
}

ContrastiveLoss uniform_contrastive_loss(const Matrix& embeddings, const ContrastiveSets& sets,
                                         Temperature tau) {
    return contrastive_core(embeddings, sets, tau, true);
}

}  // namespace tablekit
