#include "tablekit/pointer.hpp"

#include <algorithm>

#include "nll_detail.hpp"

namespace tablekit {

SequenceLayout build_sequence_layout(int n_real_boxes, int box_slots) {
    if (n_real_boxes < 0) throw std::invalid_argument("negative box count");
    if (n_real_boxes + 1 > box_slots)
        throw std::invalid_argument("too many boxes: " + std::to_string(n_real_boxes) +
                                    " + special slot exceed " + std::to_string(box_slots));
    SequenceLayout layout;
    layout.box_slots = box_slots;
    layout.n_real_boxes = n_real_boxes;
    layout.n_pad = box_slots - 1 - n_real_boxes;
    layout.attention_mask.assign(box_slots, false);
    for (int i = 0; i <= n_real_boxes; ++i) layout.attention_mask[i] = true;
    return layout;
}

std::pair<Matrix, Matrix> split_hidden(const Matrix& h, const SequenceLayout& layout,
                                       int n_tags) {
    if (n_tags < 0 || h.rows != layout.box_slots + n_tags)
        throw std::invalid_argument("hidden state rows must equal box slots + tag count");
    Matrix b(layout.box_slots, h.cols);
    Matrix t(n_tags, h.cols);
    for (int r = 0; r < layout.box_slots; ++r)
        for (int c = 0; c < h.cols; ++c) b.at(r, c) = h.at(r, c);
    for (int r = 0; r < n_tags; ++r)
        for (int c = 0; c < h.cols; ++c) t.at(r, c) = h.at(layout.box_slots + r, c);
    return {std::move(b), std::move(t)};
}

Matrix pointer_logits(const Matrix& box_proj, const Matrix& tag_proj,
                      const std::vector<int>& data_tags, Temperature tau) {
    if (box_proj.cols != tag_proj.cols)
        throw std::invalid_argument("pointer_logits: projected dims differ");
    if (data_tags.empty()) throw std::invalid_argument("pointer_logits: empty data tag set");
    for (int k : data_tags)
        if (k < 0 || k >= tag_proj.rows)
            throw std::out_of_range("pointer_logits: data tag index out of range");
    Matrix out(box_proj.rows, static_cast<int>(data_tags.size()));
    for (int j = 0; j < box_proj.rows; ++j)
        for (size_t m = 0; m < data_tags.size(); ++m)
            out.at(j, static_cast<int>(m)) = dot_rows(box_proj, j, tag_proj, data_tags[m]) / tau.tau;
    return out;
}

LossValue pointer_loss(const Matrix& logits, const std::vector<int>& targets) {
    detail::RowNll nll = detail::mean_row_nll(logits, targets, "pointer_loss");
    return LossValue{nll.value, std::move(nll.grad)};
}

ScalarLoss empty_pointer_loss(const std::vector<double>& special_proj, const Matrix& tag_proj,
                              const std::vector<int>& data_tags,
                              const std::vector<bool>& empty_labels) {
    if (data_tags.empty()) throw std::invalid_argument("empty_pointer_loss: empty data tag set");
    if (static_cast<int>(special_proj.size()) != tag_proj.cols)
        throw std::invalid_argument("empty_pointer_loss: special embedding dim mismatch");
    if (empty_labels.size() != data_tags.size())
        throw std::invalid_argument("empty_pointer_loss: one label per data tag required");
    const int n = static_cast<int>(data_tags.size());
    ScalarLoss out;
    out.grad.assign(n, 0.0);
    for (int m = 0; m < n; ++m) {
        int k = data_tags[m];
        if (k < 0 || k >= tag_proj.rows)
            throw std::out_of_range("empty_pointer_loss: data tag index out of range");
        double z = 0.0;
        for (int c = 0; c < tag_proj.cols; ++c) z += special_proj[c] * tag_proj.at(k, c);
        double y = empty_labels[m] ? 1.0 : 0.0;
        out.value += detail::softplus(z) - y * z;
        out.grad[m] = (detail::sigmoid(z) - y) / n;
    }
    out.value /= n;
    return out;
}

std::vector<double> empty_scores(const std::vector<double>& special_proj,
                                 const Matrix& tag_proj, const std::vector<int>& data_tags) {
    if (static_cast<int>(special_proj.size()) != tag_proj.cols)
        throw std::invalid_argument("empty_scores: special embedding dim mismatch");
    std::vector<double> scores;
    scores.reserve(data_tags.size());
    for (int k : data_tags) {
        if (k < 0 || k >= tag_proj.rows)
            throw std::out_of_range("empty_scores: data tag index out of range");
        double z = 0.0;
        for (int c = 0; c < tag_proj.cols; ++c) z += special_proj[c] * tag_proj.at(k, c);
        scores.push_back(detail::sigmoid(z));
    }
    return scores;
}

PointerAssignment resolve_pointers(const Matrix& logits, const std::vector<double>& empty_scores,
                                   const SequenceLayout& layout) {
    if (logits.rows != layout.n_real_boxes)
        throw std::invalid_argument("resolve_pointers: one logit row per real box required");
    if (static_cast<int>(empty_scores.size()) != logits.cols)
        throw std::invalid_argument("resolve_pointers: one empty score per data tag required");
    PointerAssignment out;
    out.box_to_tag.resize(logits.rows);
    out.tag_boxes.assign(logits.cols, {});
    for (int j = 0; j < logits.rows; ++j) {
        int best = 0;
        for (int m = 1; m < logits.cols; ++m)
            if (logits.at(j, m) > logits.at(j, best)) best = m;  // ties keep the lowest index
        out.box_to_tag[j] = best;
        out.tag_boxes[best].push_back(j);
    }
    out.empty_tags.resize(logits.cols);
    for (int m = 0; m < logits.cols; ++m)
        out.empty_tags[m] = empty_scores[m] > 0.5 && out.tag_boxes[m].empty();
    return out;
}

HtmlNode assemble_table(const OtslSequence& seq, const PointerAssignment& assignment,
                        const std::vector<std::string>& texts) {
    std::vector<int> data_tags = data_tag_indices(seq);
    if (assignment.tag_boxes.size() != data_tags.size() ||
        assignment.empty_tags.size() != data_tags.size())
        throw std::invalid_argument("assemble_table: assignment size does not match data tags");
    if (assignment.box_to_tag.size() != texts.size())
        throw std::invalid_argument("assemble_table: one text per box required");

    TableGrid grid = otsl_to_grid(seq);  // cell m corresponds to data tag m
    for (size_t m = 0; m < data_tags.size(); ++m) {
        const std::vector<int>& boxes = assignment.tag_boxes[m];
        if (boxes.empty()) continue;  // empty or unassigned: td stays contentless
        std::string joined;
        for (size_t i = 0; i < boxes.size(); ++i) {
            if (i) joined += ' ';
            joined += texts[boxes[i]];
        }
        grid.cells[m].empty = false;
        grid.cells[m].content = std::move(joined);
    }
    return grid_to_html(grid, true);
}

}  // namespace tablekit
