#include "tablekit/teds.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace tablekit {

size_t levenshtein(const std::string& a, const std::string& b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    std::vector<size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), size_t{0});
    for (size_t i = 0; i < a.size(); ++i) {
        size_t corner = row[0];
        row[0] = i + 1;
        for (size_t j = 0; j < b.size(); ++j) {
            size_t up = row[j + 1];
            row[j + 1] = a[i] == b[j] ? corner
                                      : 1 + std::min({corner, up, row[j]});
            corner = up;
        }
    }
    return row[b.size()];
}

double normalized_levenshtein(const std::string& a, const std::string& b) {
    size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double CostModel::substitute_cost(const HtmlNode& a, const HtmlNode& b) const {
    if (a.tag != b.tag) return 1.0;
    if (a.colspan != b.colspan || a.rowspan != b.rowspan) return 1.0;
    if (a.tag == "td" && content_aware)
        return normalized_levenshtein(a.text.value_or(""), b.text.value_or(""));
    return 0.0;
}

namespace {

// Postorder flattening with leftmost-leaf indices and LR keyroots, the
// ingredients of the Zhang-Shasha dynamic program.
struct FlatTree {
    std::vector<const HtmlNode*> nodes;  // postorder
    std::vector<int> lml;                // leftmost leaf of each subtree

    int flatten(const HtmlNode& n) {
        int first = -1;
        for (const HtmlNode& c : n.children) {
            int ci = flatten(c);
            if (first == -1) first = lml[ci];
        }
        int idx = static_cast<int>(nodes.size());
        nodes.push_back(&n);
        lml.push_back(n.children.empty() ? idx : first);
        return idx;
    }

    std::vector<int> keyroots() const {
        // A keyroot is the highest node for its leftmost-leaf value.
        std::vector<int> last(nodes.size(), -1);
        for (size_t i = 0; i < nodes.size(); ++i) last[lml[i]] = static_cast<int>(i);
        std::vector<int> roots;
        for (size_t i = 0; i < nodes.size(); ++i)
            if (last[lml[i]] == static_cast<int>(i)) roots.push_back(static_cast<int>(i));
        return roots;
    }
};

}  // namespace

double tree_edit_distance(const HtmlNode& a, const HtmlNode& b, const CostModel& cost) {
    FlatTree ta, tb;
    ta.flatten(a);
    tb.flatten(b);
    const int n = static_cast<int>(ta.nodes.size());
    const int m = static_cast<int>(tb.nodes.size());
    const double del = cost.delete_cost();
    const double ins = cost.insert_cost();

    std::vector<std::vector<double>> td(n, std::vector<double>(m, 0.0));
    std::vector<std::vector<double>> fd(n + 1, std::vector<double>(m + 1, 0.0));

    for (int i1 : ta.keyroots()) {
        for (int j1 : tb.keyroots()) {
            int li = ta.lml[i1];
            int lj = tb.lml[j1];
            int an = i1 - li + 1;
            int bn = j1 - lj + 1;
            fd[0][0] = 0.0;
            for (int di = 1; di <= an; ++di) fd[di][0] = fd[di - 1][0] + del;
            for (int dj = 1; dj <= bn; ++dj) fd[0][dj] = fd[0][dj - 1] + ins;
            for (int di = 1; di <= an; ++di) {
                int i = li + di - 1;
                for (int dj = 1; dj <= bn; ++dj) {
                    int j = lj + dj - 1;
                    if (ta.lml[i] == li && tb.lml[j] == lj) {
                        fd[di][dj] = std::min(
                            {fd[di - 1][dj] + del, fd[di][dj - 1] + ins,
                             fd[di - 1][dj - 1] + cost.substitute_cost(*ta.nodes[i], *tb.nodes[j])});
                        td[i][j] = fd[di][dj];
                    } else {
                        int pi = ta.lml[i] - li;
                        int pj = tb.lml[j] - lj;
                        fd[di][dj] = std::min(
                            {fd[di - 1][dj] + del, fd[di][dj - 1] + ins, fd[pi][pj] + td[i][j]});
                    }
                }
            }
        }
    }
    return td[n - 1][m - 1];
}

namespace {

double teds_with(const HtmlNode& pred, const HtmlNode& gt, const CostModel& cost) {
    int np = node_count(pred);
    int ng = node_count(gt);
    if (np == 0 && ng == 0) throw std::invalid_argument("teds undefined for two empty trees");
    double dist = tree_edit_distance(pred, gt, cost);
    double v = 1.0 - dist / static_cast<double>(std::max(np, ng));
    return std::max(0.0, v);
}

HtmlNode erase_content(const HtmlNode& n) {
    HtmlNode out = n;
    out.text.reset();
    out.children.clear();
    for (const HtmlNode& c : n.children) out.children.push_back(erase_content(c));
    return out;
}

}  // namespace

double teds(const HtmlNode& pred, const HtmlNode& gt) {
    return teds_with(pred, gt, CostModel{true});
}

double teds_struct(const HtmlNode& pred, const HtmlNode& gt) {
    return teds(erase_content(pred), erase_content(gt));
}

}  // namespace tablekit
