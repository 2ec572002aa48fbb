"""Table structure toolkit: OTSL/HTML conversion, TEDS scoring, layout
pointing losses, and synthetic corpus generation backed by the C++ core."""

from ._core import (
    combined_loss,
    data_tag_positions,
    empty_pointer_loss,
    filter_mask,
    filter_scores,
    generate_corpus_json,
    grid_json_to_html,
    html_to_grid_json,
    html_to_otsl,
    normalized_levenshtein,
    oracle_assemble,
    otsl_to_html,
    otsl_tokens,
    pointer_loss,
    sample_gt_html,
    span_coefficient,
    tag_classification_loss,
    teds,
    teds_struct,
)

__all__ = [
    "combined_loss",
    "data_tag_positions",
    "empty_pointer_loss",
    "filter_mask",
    "filter_scores",
    "generate_corpus_json",
    "grid_json_to_html",
    "html_to_grid_json",
    "html_to_otsl",
    "normalized_levenshtein",
    "oracle_assemble",
    "otsl_to_html",
    "otsl_tokens",
    "pointer_loss",
    "sample_gt_html",
    "span_coefficient",
    "tag_classification_loss",
    "teds",
    "teds_struct",
]
