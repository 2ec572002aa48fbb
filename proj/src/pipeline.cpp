#include "tablekit/pipeline.hpp"

namespace tablekit {

PointedTable point_and_assemble(const OtslSequence& seq, const Matrix& h,
                                const SequenceLayout& layout, const ProjectionMatrix& proj_b,
                                const ProjectionMatrix& proj_t,
                                const std::vector<std::string>& texts, Temperature tau,
                                const std::vector<bool>* keep_mask) {
    int n_tags = static_cast<int>(seq.tokens().size());
    if (static_cast<int>(texts.size()) != layout.n_real_boxes)
        throw std::invalid_argument("point_and_assemble: one text per real box required");
    if (keep_mask && static_cast<int>(keep_mask->size()) != layout.n_real_boxes)
        throw std::invalid_argument("point_and_assemble: keep mask length mismatch");

    auto [b, t] = split_hidden(h, layout, n_tags);
    Matrix b_proj = project(b, proj_b);
    Matrix t_proj = project(t, proj_t);
    std::vector<int> tags = data_tag_indices(seq);

    // Real box rows start at slot 1; drop the ones the keep mask rejects.
    std::vector<int> kept;
    std::vector<std::string> kept_texts;
    for (int j = 0; j < layout.n_real_boxes; ++j) {
        if (keep_mask && !(*keep_mask)[j]) continue;
        kept.push_back(j);
        kept_texts.push_back(texts[j]);
    }
    Matrix real(static_cast<int>(kept.size()), b_proj.cols);
    for (size_t r = 0; r < kept.size(); ++r)
        for (int c = 0; c < b_proj.cols; ++c) real.at(static_cast<int>(r), c) = b_proj.at(1 + kept[r], c);

    std::vector<double> special(b_proj.cols);
    for (int c = 0; c < b_proj.cols; ++c) special[c] = b_proj.at(SequenceLayout::special_slot, c);

    Matrix logits = pointer_logits(real, t_proj, tags, tau);
    std::vector<double> scores = empty_scores(special, t_proj, tags);
    SequenceLayout pointed = build_sequence_layout(static_cast<int>(kept.size()), layout.box_slots);
    PointerAssignment assignment = resolve_pointers(logits, scores, pointed);
    HtmlNode html = assemble_table(seq, assignment, kept_texts);
    return PointedTable{std::move(html), std::move(assignment)};
}

PointedTable run_oracle_pipeline(const CorpusSample& sample, int d, double margin,
                                 Temperature tau, bool filter_distractors) {
    int n_cells = static_cast<int>(data_tag_indices(sample.otsl).size());
    if (d <= 0) d = n_cells + 2;
    OracleFeatures oracle = oracle_features(sample, d, margin);

    std::vector<std::string> texts;
    std::vector<bool> keep;
    for (const AnnotatedBox& box : sample.annotations.boxes) {
        texts.push_back(box.text);
        keep.push_back(!box.distractor);
    }
    const std::vector<bool>* mask = filter_distractors ? &keep : nullptr;
    return point_and_assemble(sample.otsl, oracle.h, sample.layout, oracle.proj_b, oracle.proj_t,
                              texts, tau, mask);
}

}  // namespace tablekit
