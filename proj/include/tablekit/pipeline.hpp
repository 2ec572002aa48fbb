#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tablekit/corpus.hpp"
#include "tablekit/html.hpp"
#include "tablekit/matrix.hpp"
#include "tablekit/otsl.hpp"
#include "tablekit/pointer.hpp"

namespace tablekit {

struct PointedTable {
    HtmlNode html;
    PointerAssignment assignment;
};

// Full pointing pass: split hidden states, project, score box-tag pairs,
// resolve, assemble. keep_mask (per real box) drops boxes before pointing,
// which is how the layout filter plugs in.
PointedTable point_and_assemble(const OtslSequence& seq, const Matrix& h,
                                const SequenceLayout& layout, const ProjectionMatrix& proj_b,
                                const ProjectionMatrix& proj_t,
                                const std::vector<std::string>& texts, Temperature tau,
                                const std::vector<bool>* keep_mask = nullptr);

// Oracle-feature pipeline for one sample; d <= 0 picks the smallest valid
// feature dimension.
PointedTable run_oracle_pipeline(const CorpusSample& sample, int d = 0, double margin = 4.0,
                                 Temperature tau = Temperature(0.1),
                                 bool filter_distractors = true);

}  // namespace tablekit
