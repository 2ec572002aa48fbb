#include "tablekit/losses.hpp"

#include <cmath>

#include "nll_detail.hpp"

namespace tablekit {

TagLossValue tag_classification_loss(const TagLogits& input) {
    detail::RowNll nll = detail::mean_row_nll(input.logits, input.targets,
                                              "tag_classification_loss");
    return TagLossValue{nll.value, std::move(nll.grad)};
}

double combined_loss(double cls, double ptr, double ptr_empty, double contr_row_mean,
                     double contr_col_mean, const LossWeights& w) {
    const double components[] = {cls, ptr, ptr_empty, contr_row_mean, contr_col_mean};
    for (double v : components)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite loss component");
    const double weights[] = {w.cls, w.ptr, w.ptr_empty, w.contr_row, w.contr_col};
    for (double v : weights)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("loss weights must be finite and non-negative");
    return w.cls * cls + w.ptr * ptr + w.ptr_empty * ptr_empty + w.contr_row * contr_row_mean +
           w.contr_col * contr_col_mean;
}

std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
    double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
    std::vector<double> grad(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        double xi = x[i];
        x[i] = xi + h;
        double fp = f(x);
        x[i] = xi - h;
        double fm = f(x);
        x[i] = xi;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("non-finite evaluation in finite differences");
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

double max_rel_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    if (analytic.size() != numeric.size())
        throw std::invalid_argument("gradient size mismatch");
    double worst = 0.0;
    for (size_t i = 0; i < analytic.size(); ++i) {
        double denom = std::max({1.0, std::abs(analytic[i]), std::abs(numeric[i])});
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
    }
    return worst;
}

}  // namespace tablekit
