#include "tablekit/matrix.hpp"

namespace tablekit {

Matrix project(const Matrix& x, const ProjectionMatrix& p) {
    if (x.cols != p.d_in()) throw std::invalid_argument("project: input dim mismatch");
    Matrix out(x.rows, p.d_out());
    for (int r = 0; r < x.rows; ++r) {
        for (int o = 0; o < p.d_out(); ++o) {
            double s = p.bias[o];
            for (int c = 0; c < x.cols; ++c) s += x.at(r, c) * p.weights.at(o, c);
            out.at(r, o) = s;
        }
    }
    return out;
}

std::vector<double> project_row(const std::vector<double>& x, const ProjectionMatrix& p) {
    if (static_cast<int>(x.size()) != p.d_in())
        throw std::invalid_argument("project_row: input dim mismatch");
    std::vector<double> out(p.d_out());
    for (int o = 0; o < p.d_out(); ++o) {
        double s = p.bias[o];
        for (int c = 0; c < p.d_in(); ++c) s += x[c] * p.weights.at(o, c);
        out[o] = s;
    }
    return out;
}

}  // namespace tablekit
