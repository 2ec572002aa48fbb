#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tablekit/corpus.hpp"
#include "tablekit/losses.hpp"
#include "tablekit/pointer.hpp"

using namespace tablekit;

namespace {

Matrix from_rows(std::vector<std::vector<double>> rows) {
    Matrix m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c)
            m.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    return m;
}

}  // namespace

TEST_CASE("sequence layout: special, real and padded slots") {
    SequenceLayout layout = build_sequence_layout(3, 8);
    CHECK(layout.n_pad == 4);
    CHECK(layout.attention_mask ==
          std::vector<bool>{true, true, true, true, false, false, false, false});

    SequenceLayout empty = build_sequence_layout(0, 4);
    CHECK(empty.attention_mask == std::vector<bool>{true, false, false, false});

    SequenceLayout full = build_sequence_layout(639, 640);
    CHECK(full.n_pad == 0);

    CHECK_THROWS_AS(build_sequence_layout(640, 640), std::invalid_argument);
}

TEST_CASE("split_hidden partitions rows") {
    Matrix h(5, 2);
    for (int r = 0; r < 5; ++r) h.at(r, 0) = r;
    SequenceLayout layout = build_sequence_layout(1, 2);
    auto [b, t] = split_hidden(h, layout, 3);
    CHECK(b.rows == 2);
    CHECK(t.rows == 3);
    CHECK(b.at(1, 0) == 1.0);
    CHECK(t.at(0, 0) == 2.0);
    CHECK_THROWS_AS(split_hidden(h, layout, 4), std::invalid_argument);
}

TEST_CASE("project applies a row-wise affine map") {
    Matrix x = from_rows({{1.0, 2.0}});
    CHECK(project(x, ProjectionMatrix::identity(2)).data == x.data);

    ProjectionMatrix bias_only(Matrix(2, 2, 0.0), {3.0, -1.0});
    Matrix shifted = project(x, bias_only);
    CHECK(shifted.at(0, 0) == 3.0);
    CHECK(shifted.at(0, 1) == -1.0);

    ProjectionMatrix w(from_rows({{1.0, 1.0}, {0.0, 1.0}}), {0.0, 0.0});
    Matrix y = project(x, w);
    CHECK(y.at(0, 0) == 3.0);
    CHECK(y.at(0, 1) == 2.0);
}

TEST_CASE("pointer logits are scaled dot products over data tags") {
    Matrix boxes = from_rows({{1.0, 0.0}, {0.0, 1.0}});
    Matrix tags = from_rows({{9.0, 9.0}, {1.0, 0.0}, {0.0, 1.0}});
    std::vector<int> data_tags{1, 2};

    Matrix unit = pointer_logits(boxes, tags, data_tags, Temperature(1.0));
    CHECK(unit.at(0, 0) == 1.0);
    CHECK(unit.at(0, 1) == 0.0);
    CHECK(unit.at(1, 1) == 1.0);

    Matrix halved = pointer_logits(boxes, tags, data_tags, Temperature(0.5));
    for (size_t i = 0; i < unit.data.size(); ++i) CHECK(halved.data[i] == 2.0 * unit.data[i]);

    Matrix sharp = pointer_logits(from_rows({{1.0, 0.0}}), from_rows({{1.0, 0.0}, {0.0, 1.0}}),
                                  {0, 1}, Temperature(0.1));
    CHECK(sharp.at(0, 0) == doctest::Approx(10.0));
    CHECK(sharp.at(0, 1) == 0.0);

    CHECK_THROWS_AS(pointer_logits(boxes, tags, {}, Temperature(1.0)), std::invalid_argument);
    CHECK_THROWS_AS(pointer_logits(boxes, from_rows({{1.0}}), {0}, Temperature(1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(Temperature(0.0), std::invalid_argument);
}

TEST_CASE("pointer loss closed forms") {
    // Single column: softmax is 1, loss 0.
    CHECK(pointer_loss(from_rows({{2.5}}), {0}).value == 0.0);

    // One box, logits [ln 2, 0], target 0 -> ln(3/2).
    LossValue two = pointer_loss(from_rows({{std::log(2.0), 0.0}}), {0});
    CHECK(two.value == doctest::Approx(0.40546510810816444).epsilon(1e-12));

    // Uniform logits over 4 columns -> ln 4 per box.
    LossValue uniform = pointer_loss(from_rows({{0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}}),
                                     {2, 0});
    CHECK(uniform.value == doctest::Approx(1.3862943611198906).epsilon(1e-12));

    // Loss is non-negative and only saturated targets drive it to zero.
    LossValue sat = pointer_loss(from_rows({{30.0, 0.0}, {0.0, 30.0}}), {0, 1});
    CHECK(sat.value >= 0.0);
    CHECK(sat.value < 1e-9);

    CHECK_THROWS_AS(pointer_loss(from_rows({{0.0, 1.0}}), {2}), std::out_of_range);
}

TEST_CASE("pointer loss gradient matches finite differences") {
    Matrix logits = from_rows({{0.3, -0.7, 1.1}, {0.0, 0.4, -0.2}});
    std::vector<int> targets{2, 0};
    LossValue loss = pointer_loss(logits, targets);
    auto numeric = finite_diff_gradient(
        [&](const std::vector<double>& vars) {
            Matrix m = logits;
            m.data = vars;
            return pointer_loss(m, targets).value;
        },
        logits.data, 1e-6);
    CHECK(max_rel_error(loss.grad.data, numeric) < 1e-4);
}

TEST_CASE("empty pointer loss closed forms") {
    Matrix tags = from_rows({{0.0}, {30.0}});
    // Logit 0 with label 1 -> -ln 0.5.
    ScalarLoss at_zero = empty_pointer_loss({1.0}, from_rows({{0.0}}), {0}, {true});
    CHECK(at_zero.value == doctest::Approx(0.6931471805599453).epsilon(1e-12));

    // Saturated logit with label 1 -> ~0.
    ScalarLoss saturated = empty_pointer_loss({1.0}, tags, {1}, {true});
    CHECK(saturated.value < 1e-9);

    // Two tags at logit 0, labels {1, 0} -> mean is still -ln 0.5.
    ScalarLoss mixed = empty_pointer_loss({0.0}, from_rows({{1.0}, {2.0}}), {0, 1},
                                          {true, false});
    CHECK(mixed.value == doctest::Approx(0.6931471805599453).epsilon(1e-12));

    CHECK_THROWS_AS(empty_pointer_loss({1.0}, tags, {}, {}), std::invalid_argument);
}

TEST_CASE("resolve_pointers argmax, ties, empties and temperature invariance") {
    SequenceLayout layout = build_sequence_layout(2, 4);
    Matrix logits = from_rows({{5.0, 1.0, 1.0}, {5.0, 5.0, 1.0}});  // row 1 ties at 0
    std::vector<double> scores{0.1, 0.9, 0.9};
    PointerAssignment a = resolve_pointers(logits, scores, layout);
    CHECK(a.box_to_tag == std::vector<int>{0, 0});
    CHECK(a.tag_boxes[0] == std::vector<int>{0, 1});  // both boxes, input order
    CHECK(a.empty_tags == std::vector<bool>{false, true, true});

    // Scaling logits by any positive factor cannot change the assignment.
    for (double tau : {0.05, 0.1, 1.0, 7.0}) {
        Matrix scaled = logits;
        for (double& v : scaled.data) v /= tau;
        PointerAssignment b = resolve_pointers(scaled, scores, layout);
        CHECK(b.box_to_tag == a.box_to_tag);
        CHECK(b.empty_tags == a.empty_tags);
    }

    // A tag with high empty score that still receives a box is not empty.
    PointerAssignment c = resolve_pointers(from_rows({{3.0, 0.0}}), {0.99, 0.99},
                                           build_sequence_layout(1, 2));
    CHECK(c.empty_tags == std::vector<bool>{false, true});
}

TEST_CASE("assembly places every box text in exactly one td") {
    // Random logits and scores: whatever the resolution, each box's text
    // must land in exactly one cell and per-cell order must follow the
    // assignment lists.
    CorpusConfig cfg;
    cfg.max_rows = 4;
    cfg.max_cols = 4;
    cfg.span_probability = 0.3;
    cfg.max_span = 2;
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng = Rng::derived(1234, trial);
        TableGrid g = generate_grid(rng, cfg);
        OtslSequence seq = grid_to_otsl(g);
        int n_tags = g.cell_count();
        int n_boxes = rng.uniform_int(0, 6);
        Matrix logits(n_boxes, n_tags);
        for (double& v : logits.data) v = rng.uniform(-2.0, 2.0);
        std::vector<double> scores;
        for (int m = 0; m < n_tags; ++m) scores.push_back(rng.uniform01());
        std::vector<std::string> texts;
        for (int b = 0; b < n_boxes; ++b) texts.push_back("w" + std::to_string(b));

        PointerAssignment a =
            resolve_pointers(logits, scores, build_sequence_layout(n_boxes, n_boxes + 1));
        HtmlNode table = assemble_table(seq, a, texts);

        // Collect td texts in reading order and split back into words.
        std::vector<std::string> words;
        for (const HtmlNode& tr : table.children) {
            for (const HtmlNode& td : tr.children) {
                if (!td.text) continue;
                std::istringstream in(*td.text);
                std::string w;
                while (in >> w) words.push_back(w);
            }
        }
        // Same multiset as the inputs: each box text exactly once.
        std::vector<std::string> expected;
        for (const auto& tag_list : a.tag_boxes)
            for (int b : tag_list) expected.push_back(texts[b]);
        CHECK(words == expected);
        CHECK(words.size() == texts.size());
    }
}

TEST_CASE("assemble_table joins many-to-one texts in box order") {
    OtslSequence two = OtslSequence::parse("C C NL");
    PointerAssignment a;
    a.box_to_tag = {0, 1};
    a.empty_tags = {false, false};
    a.tag_boxes = {{0}, {1}};
    CHECK(html_to_string(assemble_table(two, a, {"a", "b"})) ==
          "<table><tr><td>a</td><td>b</td></tr></table>");

    OtslSequence one = OtslSequence::parse("C NL");
    PointerAssignment many;
    many.box_to_tag = {0, 0};
    many.empty_tags = {false};
    many.tag_boxes = {{0, 1}};
    CHECK(html_to_string(assemble_table(one, many, {"foo", "bar"})) ==
          "<table><tr><td>foo bar</td></tr></table>");

    PointerAssignment empty;
    empty.box_to_tag = {};
    empty.empty_tags = {true};
    empty.tag_boxes = {{}};
    CHECK(html_to_string(assemble_table(one, empty, {})) ==
          "<table><tr><td></td></tr></table>");

    CHECK_THROWS_AS(assemble_table(two, empty, {}), std::invalid_argument);
}
