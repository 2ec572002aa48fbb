#pragma once

#include <functional>
#include <vector>

#include "tablekit/matrix.hpp"

namespace tablekit {

// Per-position vocabulary logits with target token ids.
struct TagLogits {
    Matrix logits;  // T x v
    std::vector<int> targets;
};

struct LossWeights {
    double cls = 1.0;
    double ptr = 1.0;
    double ptr_empty = 1.0;
    double contr_row = 0.5;
    double contr_col = 0.5;
};

struct TagLossValue {
    double value = 0.0;
    Matrix grad;  // w.r.t. the logits
};

// Mean over positions of the negative log softmax at the target id.
TagLossValue tag_classification_loss(const TagLogits& input);

// Weighted sum of the five components; the contrastive means already carry
// their per-box averaging.
double combined_loss(double cls, double ptr, double ptr_empty, double contr_row_mean,
                     double contr_col_mean, const LossWeights& w);

// Central finite differences, the oracle every analytic gradient is checked
// against.
std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
    double h);

// max_i |a_i - f_i| / max(1, |a_i|, |f_i|)
double max_rel_error(const std::vector<double>& analytic, const std::vector<double>& numeric);

}  // namespace tablekit
