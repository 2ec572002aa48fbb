#include <doctest.h>

#include "tablekit/corpus.hpp"
#include "tablekit/otsl.hpp"

using namespace tablekit;

TEST_CASE("parse accepts plain rectangular sequences") {
    OtslSequence s = OtslSequence::parse("C C NL C C NL");
    CHECK(s.n_rows() == 2);
    CHECK(s.n_cols() == 2);
    CHECK(s.str() == "C C NL C C NL");
}

TEST_CASE("parse accepts merges with legal neighbors") {
    CHECK_NOTHROW(OtslSequence::parse("C L NL C C NL"));   // colspan in row 0
    CHECK_NOTHROW(OtslSequence::parse("C C NL U C NL"));   // rowspan in column 0
    CHECK_NOTHROW(OtslSequence::parse("C L NL U X NL"));   // 2x2 merge
}

TEST_CASE("parse diagnostics carry the rule and location") {
    try {
        OtslSequence::parse("L C NL");
        FAIL("expected IllegalL");
    } catch (const OtslParseError& e) {
        CHECK(e.kind == "IllegalL");
        CHECK(e.row == 0);
        CHECK(e.col == 0);
    }

    try {
        OtslSequence::parse("U C NL");
        FAIL("expected IllegalU");
    } catch (const OtslParseError& e) {
        CHECK(e.kind == "IllegalU");
    }

    try {
        OtslSequence::parse("C C NL C X NL");  // X left neighbor is C
        FAIL("expected IllegalX");
    } catch (const OtslParseError& e) {
        CHECK(e.kind == "IllegalX");
        CHECK(e.row == 1);
        CHECK(e.col == 1);
    }

    CHECK_THROWS_AS(OtslSequence::parse(""), OtslParseError);
    CHECK_THROWS_AS(OtslSequence::parse("C C NL C NL"), OtslParseError);  // ragged
    CHECK_THROWS_AS(OtslSequence::parse("C C"), OtslParseError);          // no trailing NL
    CHECK_THROWS_AS(OtslSequence::parse("NL"), OtslParseError);           // no cells

    try {
        OtslSequence::parse("C Q NL");
        FAIL("expected UnknownToken");
    } catch (const OtslParseError& e) {
        CHECK(e.kind == "UnknownToken");
    }
}

TEST_CASE("otsl_to_grid reconstructs simple and merged cells") {
    TableGrid plain = otsl_to_grid(OtslSequence::parse("C C NL C C NL"));
    CHECK(plain.n_rows == 2);
    CHECK(plain.n_cols == 2);
    CHECK(plain.cell_count() == 4);
    for (const CellSpec& c : plain.cells) {
        CHECK(c.rowspan == 1);
        CHECK(c.colspan == 1);
    }

    TableGrid wide = otsl_to_grid(OtslSequence::parse("C L NL C C NL"));
    CHECK(wide.cell_count() == 3);
    CHECK(wide.cells[0].colspan == 2);
    CHECK(wide.cells[0].rowspan == 1);

    TableGrid tall = otsl_to_grid(OtslSequence::parse("C C NL U C NL"));
    CHECK(tall.cell_count() == 3);
    CHECK(tall.cells[0].rowspan == 2);
}

TEST_CASE("otsl_to_grid rejects non-rectangular merges") {
    // Locally legal (U below X is allowed by the neighbor rules) but the
    // merged region is L-shaped.
    CHECK_THROWS_AS(otsl_to_grid(OtslSequence::parse("C L NL U X NL C U NL")),
                    NonRectangularMerge);
}

TEST_CASE("grid_to_otsl emits the expected token strings") {
    CHECK(grid_to_otsl(otsl_to_grid(OtslSequence::parse("C NL"))).str() == "C NL");

    TableGrid merged{2, 2, {CellSpec{0, 0, 2, 2, true, {}}}};
    CHECK(grid_to_otsl(merged).str() == "C L NL U X NL");
}

TEST_CASE("data_tag_indices counts C token positions") {
    CHECK(data_tag_indices(OtslSequence::parse("C C NL C C NL")) ==
          std::vector<int>{0, 1, 3, 4});
    CHECK(data_tag_indices(OtslSequence::parse("C L NL C C NL")) == std::vector<int>{0, 3, 4});
    CHECK(data_tag_indices(OtslSequence::parse("C NL")) == std::vector<int>{0});
}

TEST_CASE("round trip grid -> otsl -> grid over randomized grids") {
    CorpusConfig cfg;
    cfg.max_rows = 8;
    cfg.max_cols = 8;
    cfg.span_probability = 0.35;
    cfg.max_span = 4;
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        TableGrid g = generate_grid(rng, cfg);
        OtslSequence seq = grid_to_otsl(g);
        CHECK(otsl_to_grid(seq) == g);  // generator leaves cells empty, so full equality
        CHECK(static_cast<int>(data_tag_indices(seq).size()) == g.cell_count());
        CHECK(static_cast<int>(seq.tokens().size()) == g.n_rows * g.n_cols + g.n_rows);
    }
}

TEST_CASE("parse is total: valid sequence or diagnostic, never both") {
    // Fuzz random token soup; each parse either yields a sequence that
    // re-serializes to the canonical form or throws a located diagnostic.
    Rng rng(99);
    const char* vocab[] = {"C", "L", "U", "X", "NL"};
    for (int i = 0; i < 2000; ++i) {
        int len = rng.uniform_int(1, 14);
        std::string text;
        for (int k = 0; k < len; ++k) {
            if (k) text += ' ';
            text += vocab[rng.uniform_int(0, 4)];
        }
        try {
            OtslSequence seq = OtslSequence::parse(text);
            CHECK(seq.str() == text);
        } catch (const OtslParseError& e) {
            CHECK_FALSE(e.kind.empty());
        }
    }
}
