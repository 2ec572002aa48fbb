#pragma once

#include <string>

#include "tablekit/html.hpp"

namespace tablekit {

// Node costs for the ordered tree edit distance. Insert/delete are fixed at
// 1. Substitution is 0 for identical nodes, 1 when the tag or a span
// attribute differs, and the length-normalized Levenshtein distance of the
// contents when both nodes are td with matching attributes and content_aware
// is set.
struct CostModel {
    bool content_aware = true;

    double insert_cost() const { return 1.0; }
    double delete_cost() const { return 1.0; }
    double substitute_cost(const HtmlNode& a, const HtmlNode& b) const;
};

size_t levenshtein(const std::string& a, const std::string& b);
double normalized_levenshtein(const std::string& a, const std::string& b);

// Exact ordered tree edit distance (Zhang-Shasha dynamic program).
double tree_edit_distance(const HtmlNode& a, const HtmlNode& b, const CostModel& cost);

// 1 - dist / max(node counts), content-aware.
double teds(const HtmlNode& pred, const HtmlNode& gt);

// teds with all td contents erased before comparison.
double teds_struct(const HtmlNode& pred, const HtmlNode& gt);

}  // namespace tablekit
