#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tablekit {

// Dense row-major matrix of doubles. Small on purpose: every consumer in this
// library works with explicit loops so gradients stay auditable.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("matrix dims must be non-negative");
    }

    double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    static Matrix identity(int n) {
        Matrix m(n, n, 0.0);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline double dot_rows(const Matrix& a, int i, const Matrix& b, int j) {
    if (a.cols != b.cols) throw std::invalid_argument("dot_rows: feature dims differ");
    double s = 0.0;
    for (int c = 0; c < a.cols; ++c) s += a.at(i, c) * b.at(j, c);
    return s;
}

// Affine map applied row-wise: y = x * W^T + bias. W is d_out x d_in.
struct ProjectionMatrix {
    Matrix weights;
    std::vector<double> bias;

    ProjectionMatrix() = default;
    ProjectionMatrix(Matrix w, std::vector<double> b) : weights(std::move(w)), bias(std::move(b)) {
        if (static_cast<int>(bias.size()) != weights.rows)
            throw std::invalid_argument("projection bias length must match weight rows");
    }

    static ProjectionMatrix identity(int d) {
        return ProjectionMatrix(Matrix::identity(d), std::vector<double>(d, 0.0));
    }

    int d_in() const { return weights.cols; }
    int d_out() const { return weights.rows; }
};

Matrix project(const Matrix& x, const ProjectionMatrix& p);

std::vector<double> project_row(const std::vector<double>& x, const ProjectionMatrix& p);

}  // namespace tablekit
