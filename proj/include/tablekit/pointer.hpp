#pragma once

#include <string>
#include <vector>

#include "tablekit/html.hpp"
#include "tablekit/matrix.hpp"
#include "tablekit/otsl.hpp"

namespace tablekit {

struct Temperature {
    double tau = 0.1;
    Temperature() = default;
    explicit Temperature(double t) : tau(t) {
        if (!(t > 0.0)) throw std::invalid_argument("temperature must be positive");
    }
};

// Layout of the box block of the decoder sequence: slot 0 is the special
// (empty-cell) box, then the image boxes, then padding slots whose attention
// is masked off.
struct SequenceLayout {
    int box_slots = 0;      // B
    int n_real_boxes = 0;   // boxes coming from the image
    int n_pad = 0;          // box_slots - 1 - n_real_boxes
    std::vector<bool> attention_mask;  // length B; true on slot 0 and real slots

    static constexpr int special_slot = 0;

    bool operator==(const SequenceLayout&) const = default;
};

SequenceLayout build_sequence_layout(int n_real_boxes, int box_slots);

// Splits the decoder hidden states (box_slots + n_tags rows) into the box
// block and the tag block.
std::pair<Matrix, Matrix> split_hidden(const Matrix& h, const SequenceLayout& layout,
                                       int n_tags);

// Scaled dot products between projected box rows and projected data-tag rows:
// entry (j, m) = b_proj[j] . t_proj[D[m]] / tau. Box rows are the real boxes
// only; the caller slices off the special and padded slots.
Matrix pointer_logits(const Matrix& box_proj, const Matrix& tag_proj,
                      const std::vector<int>& data_tags, Temperature tau);

struct LossValue {
    double value = 0.0;
    Matrix grad;  // same shape as the loss input
};

// Mean per-box negative log-likelihood of the target column under a row-wise
// softmax. Gradient is w.r.t. the logits.
LossValue pointer_loss(const Matrix& logits, const std::vector<int>& targets);

// Per-data-tag binary cross-entropy on sigma(special . tag) against the
// empty labels, averaged over the data tags. Gradient is w.r.t. the per-tag
// logits special . tag.
struct ScalarLoss {
    double value = 0.0;
    std::vector<double> grad;
};
ScalarLoss empty_pointer_loss(const std::vector<double>& special_proj, const Matrix& tag_proj,
                              const std::vector<int>& data_tags,
                              const std::vector<bool>& empty_labels);

// sigma(special . tag) per data tag; the inference-side companion of
// empty_pointer_loss.
std::vector<double> empty_scores(const std::vector<double>& special_proj,
                                 const Matrix& tag_proj, const std::vector<int>& data_tags);

// Resolved box->tag associations. Tags keep their assigned boxes in box input
// order; a tag is flagged empty iff its empty score exceeds 0.5 and no box
// selected it.
struct PointerAssignment {
    std::vector<int> box_to_tag;              // per real box: column into data_tags
    std::vector<bool> empty_tags;             // per data tag
    std::vector<std::vector<int>> tag_boxes;  // per data tag: assigned box indices
};

PointerAssignment resolve_pointers(const Matrix& logits, const std::vector<double>& empty_scores,
                                   const SequenceLayout& layout);

// Builds the final table: structure from the token sequence, each td's
// content the space-joined texts of its assigned boxes in box order.
HtmlNode assemble_table(const OtslSequence& seq, const PointerAssignment& assignment,
                        const std::vector<std::string>& texts);

}  // namespace tablekit
