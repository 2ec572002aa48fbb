#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tablekit/contrastive.hpp"
#include "tablekit/corpus.hpp"
#include "tablekit/filter.hpp"
#include "tablekit/html.hpp"
#include "tablekit/losses.hpp"
#include "tablekit/otsl.hpp"
#include "tablekit/pipeline.hpp"
#include "tablekit/pointer.hpp"
#include "tablekit/teds.hpp"

namespace py = pybind11;
using namespace tablekit;

namespace {

Matrix matrix_from_lists(const std::vector<std::vector<double>>& rows) {
    Matrix m(static_cast<int>(rows.size()),
             rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<int>(rows[r].size()) != m.cols)
            throw std::invalid_argument("ragged matrix rows");
        for (size_t c = 0; c < rows[r].size(); ++c)
            m.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
    return m;
}

std::vector<std::vector<double>> matrix_to_lists(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows, std::vector<double>(m.cols));
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) rows[r][c] = m.at(r, c);
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "table structure toolkit core";

    py::register_exception<OtslParseError>(m, "OtslParseError", PyExc_ValueError);
    py::register_exception<HtmlParseError>(m, "HtmlParseError", PyExc_ValueError);
    py::register_exception<TableShapeError>(m, "TableShapeError", PyExc_ValueError);
    py::register_exception<NonRectangularMerge>(m, "NonRectangularMerge", PyExc_ValueError);
    py::register_exception<CorpusIoError>(m, "CorpusIoError", PyExc_ValueError);

    // String-level conversions.
    m.def("otsl_to_html", [](const std::string& otsl) {
        return html_to_string(grid_to_html(otsl_to_grid(OtslSequence::parse(otsl)), false));
    }, py::arg("otsl"), "Convert an OTSL token line to table HTML (structure only).");
    m.def("html_to_otsl", [](const std::string& html) {
        return grid_to_otsl(html_to_grid(parse_html(html))).str();
    }, py::arg("html"), "Convert table HTML to an OTSL token line.");
    m.def("otsl_tokens", [](const std::string& otsl) {
        std::vector<std::string> names;
        for (OtslTag t : OtslSequence::parse(otsl).tokens()) names.emplace_back(tag_name(t));
        return names;
    }, py::arg("otsl"), "Validate an OTSL line and return its tokens.");
    m.def("data_tag_positions", [](const std::string& otsl) {
        return data_tag_indices(OtslSequence::parse(otsl));
    }, py::arg("otsl"));
    m.def("grid_json_to_html", [](const std::string& grid, bool content) {
        return html_to_string(grid_to_html(grid_from_json(grid), content));
    }, py::arg("grid_json"), py::arg("content") = true);
    m.def("html_to_grid_json", [](const std::string& html) {
        return grid_to_json(html_to_grid(parse_html(html)));
    }, py::arg("html"));

    // Metrics.
    m.def("teds", [](const std::string& pred, const std::string& gt) {
        return teds(parse_html(pred), parse_html(gt));
    }, py::arg("pred"), py::arg("gt"));
    m.def("teds_struct", [](const std::string& pred, const std::string& gt) {
        return teds_struct(parse_html(pred), parse_html(gt));
    }, py::arg("pred"), py::arg("gt"));
    m.def("normalized_levenshtein", &normalized_levenshtein, py::arg("a"), py::arg("b"));

    // Losses over nested lists.
    m.def("pointer_loss", [](const std::vector<std::vector<double>>& logits,
                             const std::vector<int>& targets) {
        LossValue v = pointer_loss(matrix_from_lists(logits), targets);
        return py::make_tuple(v.value, matrix_to_lists(v.grad));
    }, py::arg("logits"), py::arg("targets"));
    m.def("empty_pointer_loss", [](const std::vector<double>& special,
                                   const std::vector<std::vector<double>>& tags,
                                   const std::vector<int>& data_tags,
                                   const std::vector<bool>& empty_labels) {
        ScalarLoss v = empty_pointer_loss(special, matrix_from_lists(tags), data_tags,
                                          empty_labels);
        return py::make_tuple(v.value, v.grad);
    }, py::arg("special"), py::arg("tags"), py::arg("data_tags"), py::arg("empty_labels"));
    m.def("tag_classification_loss", [](const std::vector<std::vector<double>>& logits,
                                        const std::vector<int>& targets) {
        TagLossValue v = tag_classification_loss({matrix_from_lists(logits), targets});
        return py::make_tuple(v.value, matrix_to_lists(v.grad));
    }, py::arg("logits"), py::arg("targets"));
    m.def("combined_loss", [](double cls, double ptr, double ptr_empty, double contr_row,
                              double contr_col, const std::vector<double>& weights) {
        LossWeights w;
        if (!weights.empty()) {
            if (weights.size() != 5) throw std::invalid_argument("five weights required");
            w = LossWeights{weights[0], weights[1], weights[2], weights[3], weights[4]};
        }
        return combined_loss(cls, ptr, ptr_empty, contr_row, contr_col, w);
    }, py::arg("cls"), py::arg("ptr"), py::arg("ptr_empty"), py::arg("contr_row"),
       py::arg("contr_col"), py::arg("weights") = std::vector<double>{});
    m.def("span_coefficient", [](int p_anchor, int p_span, int j_anchor, int j_span) {
        CellSpec p, j;
        p.row = p_anchor;
        p.rowspan = p_span;
        j.row = j_anchor;
        j.rowspan = j_span;
        return span_coefficient(p, j, SpanAxis::Row);
    }, py::arg("p_anchor"), py::arg("p_span"), py::arg("j_anchor"), py::arg("j_span"),
       "Eq-style coefficient from axis intervals [anchor, anchor+span).");

    // Corpus generation and the oracle pipeline, JSON-line level.
    m.def("generate_corpus_json", [](uint64_t seed, int n, int max_rows, int max_cols,
                                     double span_prob, int max_span, double empty_prob,
                                     int boxes_per_cell, double watermark_prob) {
        CorpusConfig cfg;
        cfg.seed = seed;
        cfg.n_samples = n;
        cfg.max_rows = max_rows;
        cfg.max_cols = max_cols;
        cfg.span_probability = span_prob;
        cfg.max_span = max_span;
        cfg.empty_cell_probability = empty_prob;
        cfg.max_boxes_per_cell = boxes_per_cell;
        cfg.watermark.enabled = watermark_prob > 0.0;
        cfg.watermark.probability = watermark_prob;
        std::vector<std::string> lines;
        for (const CorpusSample& s : generate_corpus(cfg)) lines.push_back(sample_to_json(s));
        return lines;
    }, py::arg("seed"), py::arg("n"), py::arg("max_rows") = 6, py::arg("max_cols") = 6,
       py::arg("span_prob") = 0.2, py::arg("max_span") = 3, py::arg("empty_prob") = 0.1,
       py::arg("boxes_per_cell") = 2, py::arg("watermark_prob") = 0.0);
    m.def("oracle_assemble", [](const std::string& sample_json, double margin, double tau) {
        CorpusSample sample = sample_from_json(sample_json);
        PointedTable result = run_oracle_pipeline(sample, 0, margin, Temperature(tau));
        return html_to_string(result.html);
    }, py::arg("sample_json"), py::arg("margin") = 4.0, py::arg("tau") = 0.1);
    m.def("sample_gt_html", [](const std::string& sample_json) {
        return html_to_string(sample_from_json(sample_json).html_gt);
    }, py::arg("sample_json"));

    // Layout filter surface.
    m.def("filter_scores", [](const std::vector<std::vector<double>>& boxes,
                              const std::vector<std::vector<double>>& w1,
                              const std::vector<double>& b1,
                              const std::vector<std::vector<double>>& w2,
                              const std::vector<double>& b2) {
        FilterParams params(matrix_from_lists(w1), b1, matrix_from_lists(w2), b2);
        return filter_scores(matrix_from_lists(boxes), params);
    }, py::arg("boxes"), py::arg("w1"), py::arg("b1"), py::arg("w2"), py::arg("b2"));
    m.def("filter_mask", &filter_mask, py::arg("scores"));
}
