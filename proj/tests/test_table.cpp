#include <doctest.h>

#include "tablekit/corpus.hpp"
#include "tablekit/table.hpp"

using namespace tablekit;

namespace {

CellSpec cell(int r, int c, int rs = 1, int cs = 1) {
    CellSpec out;
    out.row = r;
    out.col = c;
    out.rowspan = rs;
    out.colspan = cs;
    out.empty = true;
    return out;
}

}  // namespace

TEST_CASE("bbox construction rejects degenerate and out-of-range boxes") {
    CHECK_NOTHROW(BBox(0.0, 0.0, 1.0, 1.0));
    CHECK_THROWS_AS(BBox(0.2, 0.2, 0.2, 0.4), std::invalid_argument);  // zero width
    CHECK_THROWS_AS(BBox(0.2, 0.4, 0.4, 0.4), std::invalid_argument);  // zero height
    CHECK_THROWS_AS(BBox(0.5, 0.0, 0.4, 1.0), std::invalid_argument);  // inverted
    CHECK_THROWS_AS(BBox(-0.1, 0.0, 0.4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BBox(0.0, 0.0, 1.1, 1.0), std::invalid_argument);
}

TEST_CASE("iou of identical, disjoint and half-overlapping boxes") {
    BBox a(0.0, 0.0, 0.5, 0.5);
    CHECK(iou(a, a) == doctest::Approx(1.0));
    CHECK(iou(a, BBox(0.6, 0.6, 0.9, 0.9)) == 0.0);
    // Shifted by half the width: intersection 0.25*0.5, union 2*0.25 - 0.125.
    BBox b(0.25, 0.0, 0.75, 0.5);
    CHECK(iou(a, b) == doctest::Approx(0.125 / 0.375));
}

TEST_CASE("validate_grid accepts a minimal 1x1 tiling") {
    TableGrid g{1, 1, {cell(0, 0)}};
    CHECK(validate_grid(g).ok);
}

TEST_CASE("validate_grid accepts a 2x2 grid with a rowspan cell") {
    // Occupancy by hand: (0,0),(1,0) -> cell 0; (0,1) -> cell 1; (1,1) -> cell 2.
    TableGrid g{2, 2, {cell(0, 0, 2, 1), cell(0, 1), cell(1, 1)}};
    CHECK(validate_grid(g).ok);
    std::vector<int> occ = g.occupancy();
    CHECK(occ == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("validate_grid reports overlap with coordinates") {
    TableGrid g{2, 2, {cell(0, 0), cell(0, 0), cell(0, 1), cell(1, 1)}};
    GridReport report = validate_grid(g);
    CHECK_FALSE(report.ok);
    bool mentions_overlap = false;
    for (const std::string& v : report.violations)
        if (v.find("overlap at (0,0)") != std::string::npos) mentions_overlap = true;
    CHECK(mentions_overlap);
}

TEST_CASE("validate_grid reports gaps and bound violations") {
    TableGrid gap{2, 2, {cell(0, 0), cell(0, 1), cell(1, 1)}};
    GridReport r1 = validate_grid(gap);
    CHECK_FALSE(r1.ok);
    CHECK(r1.violations.front().find("gap at (1,0)") != std::string::npos);

    TableGrid oob{1, 1, {cell(0, 0, 1, 2)}};
    CHECK_FALSE(validate_grid(oob).ok);
}

TEST_CASE("reading order is row-major by anchor") {
    TableGrid wide{1, 2, {cell(0, 0), cell(0, 1)}};
    CHECK(reading_order(wide) == std::vector<int>{0, 1});

    TableGrid spanned{2, 2, {cell(0, 0, 1, 2), cell(1, 0), cell(1, 1)}};
    CHECK(reading_order(spanned) == std::vector<int>{0, 1, 2});

    TableGrid tall{3, 1, {cell(0, 0), cell(1, 0), cell(2, 0)}};
    CHECK(reading_order(tall) == std::vector<int>{0, 1, 2});

    TableGrid bad{2, 2, {cell(0, 0), cell(0, 1)}};
    CHECK_THROWS_AS(reading_order(bad), std::invalid_argument);
}

TEST_CASE("span areas of a valid grid tile the full area") {
    CorpusConfig cfg;
    cfg.max_rows = 7;
    cfg.max_cols = 7;
    cfg.span_probability = 0.4;
    cfg.max_span = 3;
    Rng rng(20240517);
    for (int i = 0; i < 200; ++i) {
        TableGrid g = generate_grid(rng, cfg);
        int area = 0;
        for (const CellSpec& c : g.cells) area += c.rowspan * c.colspan;
        CHECK(area == g.n_rows * g.n_cols);
        // reading_order must be a permutation and already sorted.
        std::vector<int> order = reading_order(g);
        for (size_t k = 0; k < order.size(); ++k) CHECK(order[k] == static_cast<int>(k));
    }
}

TEST_CASE("annotation invariants") {
    TableGrid g{1, 2, {cell(0, 0), cell(0, 1)}};
    g.cells[0].empty = false;
    g.cells[0].content = "x";

    CellAnnotations good;
    AnnotatedBox real;
    real.bbox = BBox(0.1, 0.1, 0.2, 0.2);
    real.text = "x";
    real.target = 0;
    good.boxes.push_back(real);
    AnnotatedBox mark;
    mark.bbox = BBox(0.1, 0.1, 0.2, 0.2);
    mark.text = "Draft";
    mark.distractor = true;
    good.boxes.push_back(mark);
    CHECK(validate_annotations(g, good).ok);

    CellAnnotations empty_target = good;
    empty_target.boxes[0].target = 1;  // cell 1 is empty
    CHECK_FALSE(validate_annotations(g, empty_target).ok);

    CellAnnotations both = good;
    both.boxes[1].target = 0;  // distractor with a target
    CHECK_FALSE(validate_annotations(g, both).ok);
}

TEST_CASE("grid json round trip and field names") {
    TableGrid g{2, 2, {cell(0, 0, 2, 1), cell(0, 1), cell(1, 1)}};
    g.cells[1].empty = false;
    g.cells[1].content = "hello";
    std::string text = grid_to_json(g);
    CHECK(text.find("\"n_rows\"") != std::string::npos);
    CHECK(text.find("\"rowspan\"") != std::string::npos);
    CHECK(grid_from_json(text) == g);
}

TEST_CASE("annotation json round trip and field names") {
    CellAnnotations ann;
    AnnotatedBox box;
    box.bbox = BBox(0.1, 0.2, 0.3, 0.4);
    box.text = "word";
    box.target = 2;
    ann.boxes.push_back(box);
    AnnotatedBox mark;
    mark.bbox = BBox(0.1, 0.2, 0.3, 0.4);
    mark.text = "Copy";
    mark.distractor = true;
    ann.boxes.push_back(mark);
    std::string text = annotations_to_json(ann);
    CHECK(text.find("\"bbox\"") != std::string::npos);
    CHECK(text.find("\"distractor\"") != std::string::npos);
    CHECK(annotations_from_json(text) == ann);
}
