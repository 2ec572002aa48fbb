#include <doctest.h>

#include "tablekit/corpus.hpp"
#include "tablekit/teds.hpp"
#include "ted_oracle.hpp"

using namespace tablekit;

namespace {

HtmlNode td(const char* text, int colspan = 1, int rowspan = 1) {
    HtmlNode n;
    n.tag = "td";
    n.colspan = colspan;
    n.rowspan = rowspan;
    if (text && *text) n.text = text;
    return n;
}

HtmlNode table_of(std::vector<std::vector<HtmlNode>> rows) {
    HtmlNode table;
    table.tag = "table";
    for (auto& cells : rows) {
        HtmlNode tr;
        tr.tag = "tr";
        tr.children = std::move(cells);
        table.children.push_back(std::move(tr));
    }
    return table;
}

// Random small tree over table-ish labels for the oracle comparison.
HtmlNode random_tree(Rng& rng) {
    int n = rng.uniform_int(1, 6);
    std::vector<HtmlNode> nodes(n);
    const char* texts[] = {"", "a", "ab", "abc", "xyz"};
    for (int i = 0; i < n; ++i) {
        int kind = rng.uniform_int(0, 2);
        nodes[i].tag = kind == 0 ? "table" : (kind == 1 ? "tr" : "td");
        if (kind == 2) {
            nodes[i].colspan = rng.uniform_int(1, 2);
            nodes[i].rowspan = rng.uniform_int(1, 2);
            const char* t = texts[rng.uniform_int(0, 4)];
            if (*t) nodes[i].text = t;
        }
    }
    // Attach i to a random earlier node; children keep index order.
    for (int i = n - 1; i >= 1; --i) {
        int parent = rng.uniform_int(0, i - 1);
        nodes[parent].children.insert(nodes[parent].children.begin(), nodes[i]);
    }
    return nodes[0];
}

}  // namespace

TEST_CASE("levenshtein basics") {
    CHECK(levenshtein("abc", "abd") == 1);
    CHECK(levenshtein("", "abc") == 3);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(normalized_levenshtein("", "") == 0.0);
    CHECK(normalized_levenshtein("abc", "abd") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("tree edit distance on hand-checked pairs") {
    CostModel cm{true};
    HtmlNode bare = table_of({});
    HtmlNode one_tr = table_of({{}});
    CHECK(tree_edit_distance(bare, bare, cm) == 0.0);
    CHECK(tree_edit_distance(bare, one_tr, cm) == 1.0);  // single insertion
    CHECK(tree_edit_distance(one_tr, bare, cm) == 1.0);

    CHECK(tree_edit_distance(td("abc"), td("abd"), cm) == doctest::Approx(1.0 / 3.0));
    CHECK(tree_edit_distance(td("x"), td("x", 2), cm) == 1.0);  // span mismatch
}

TEST_CASE("teds fixtures") {
    HtmlNode bare = table_of({});
    HtmlNode one_tr = table_of({{}});
    CHECK(teds(one_tr, one_tr) == 1.0);
    CHECK(teds(bare, one_tr) == doctest::Approx(0.5));
    CHECK(teds(one_tr, bare) == doctest::Approx(0.5));

    // colspan-2 cell predicted as two simple cells on a 1x2 table; frozen
    // from the mapping-enumeration oracle.
    HtmlNode pred = table_of({{td("", 2)}});
    HtmlNode gt = table_of({{td(""), td("")}});
    CostModel cm{true};
    double expected = tedtest::oracle_ted(pred, gt, cm);
    CHECK(teds(pred, gt) == doctest::Approx(1.0 - expected / 4.0));
    CHECK(teds_struct(pred, gt) == doctest::Approx(1.0 - expected / 4.0));
}

TEST_CASE("teds_struct erases content") {
    HtmlNode a = table_of({{td("alpha"), td("beta")}});
    HtmlNode b = table_of({{td("gamma"), td("delta")}});
    CHECK(teds_struct(a, b) == 1.0);
    CHECK(teds(a, b) < 1.0);
}

TEST_CASE("dp distance equals the mapping-enumeration oracle on small trees") {
    CostModel cm{true};
    Rng rng(4242);
    for (int i = 0; i < 150; ++i) {
        HtmlNode a = random_tree(rng);
        HtmlNode b = random_tree(rng);
        double dp = tree_edit_distance(a, b, cm);
        double brute = tedtest::oracle_ted(a, b, cm);
        CHECK(std::abs(dp - brute) < 1e-12);
        // Symmetry comes with symmetric costs.
        CHECK(std::abs(tree_edit_distance(b, a, cm) - dp) < 1e-12);
    }
}

TEST_CASE("teds is 1 on identical random tables and stays in range") {
    CorpusConfig cfg;
    cfg.max_rows = 6;
    cfg.max_cols = 6;
    cfg.span_probability = 0.25;
    cfg.max_span = 3;
    cfg.empty_cell_probability = 0.2;
    cfg.max_boxes_per_cell = 2;
    for (int i = 0; i < 60; ++i) {
        Rng rng = Rng::derived(3131, i);
        TableGrid g = generate_grid(rng, cfg);
        generate_annotations(rng, g, cfg);
        HtmlNode tree = grid_to_html(g, true);
        CHECK(teds(tree, tree) == 1.0);

        Rng rng2 = Rng::derived(777, i);
        TableGrid g2 = generate_grid(rng2, cfg);
        generate_annotations(rng2, g2, cfg);
        HtmlNode other = grid_to_html(g2, true);
        double v = teds(tree, other);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(teds(other, tree) == doctest::Approx(v).epsilon(1e-12));
    }
}
