#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tablekit/matrix.hpp"

namespace tablekit::detail {

struct RowNll {
    double value = 0.0;
    Matrix grad;
};

// Mean over rows of -log softmax(row)[target]; gradient is
// (softmax - onehot) / rows. Shared by the pointer and tag losses.
inline RowNll mean_row_nll(const Matrix& logits, const std::vector<int>& targets,
                           const char* what) {
    if (static_cast<int>(targets.size()) != logits.rows)
        throw std::invalid_argument(std::string(what) + ": one target per row required");
    if (logits.cols < 1)
        throw std::invalid_argument(std::string(what) + ": no columns");
    RowNll out;
    out.grad = Matrix(logits.rows, logits.cols, 0.0);
    if (logits.rows == 0) return out;
    double total = 0.0;
    for (int r = 0; r < logits.rows; ++r) {
        int t = targets[r];
        if (t < 0 || t >= logits.cols)
            throw std::out_of_range(std::string(what) + ": target out of range at row " +
                                    std::to_string(r));
        double peak = logits.at(r, 0);
        for (int c = 1; c < logits.cols; ++c) peak = std::max(peak, logits.at(r, c));
        double z = 0.0;
        for (int c = 0; c < logits.cols; ++c) z += std::exp(logits.at(r, c) - peak);
        double log_z = peak + std::log(z);
        total += log_z - logits.at(r, t);
        for (int c = 0; c < logits.cols; ++c)
            out.grad.at(r, c) = std::exp(logits.at(r, c) - log_z) / logits.rows;
        out.grad.at(r, t) -= 1.0 / logits.rows;
    }
    out.value = total / logits.rows;
    return out;
}

inline double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + e^z) without overflow; BCE(sigmoid(z), y) = softplus(z) - y*z.
inline double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace tablekit::detail
