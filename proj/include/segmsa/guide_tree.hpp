#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "segmsa/errors.hpp"
#include "segmsa/segment_align.hpp"

namespace segmsa {

// Rooted binary guide tree over the input sequences. Leaves carry sequence
// indices and ids; internal nodes record their NJ merge order. Edge lengths
// are clamped at 0.
struct GuideTree {
    struct Node {
        int left = -1, right = -1;
        double left_len = 0.0, right_len = 0.0;
        int seq = -1;          // leaf: sequence index
        std::string label;     // leaf: sequence id
        int merge_order = -1;  // internal: 0-based join step
    };

    std::vector<Node> nodes;
    int root = -1;
    int leaf_count = 0;

    bool is_leaf(int n) const { return nodes[static_cast<std::size_t>(n)].left < 0; }

    // Internal node indices in join order; the root is last.
    std::vector<int> merge_sequence() const {
        std::vector<int> internal;
        for (int n = 0; n < static_cast<int>(nodes.size()); ++n)
            if (!is_leaf(n)) internal.push_back(n);
        std::sort(internal.begin(), internal.end(), [&](int a, int b) {
            return nodes[static_cast<std::size_t>(a)].merge_order <
                   nodes[static_cast<std::size_t>(b)].merge_order;
        });
        return internal;
    }
};

// Saitou-Nei neighbor joining. Q-criterion ties break on the smallest
// (id, id) pair, where a cluster's id is the lexicographically smallest leaf
// id it contains, so the result is invariant under input permutation.
// The root is placed at the midpoint of the final join edge.
inline GuideTree neighbor_joining(const DistanceMatrix& dist, const std::vector<std::string>& ids) {
    const int k = dist.size();
    if (k < 2) throw InputError("neighbor joining requires at least 2 sequences");

    GuideTree tree;
    tree.leaf_count = k;

    struct Active {
        int node;
        std::string rep; // smallest leaf id in the cluster
    };
    std::vector<Active> active;
    std::vector<std::vector<double>> d(static_cast<std::size_t>(k),
                                       std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (int i = 0; i < k; ++i) {
        tree.nodes.push_back({-1, -1, 0.0, 0.0, i, ids[static_cast<std::size_t>(i)], -1});
        active.push_back({i, ids[static_cast<std::size_t>(i)]});
        for (int j = 0; j < k; ++j) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = dist.at(i, j);
    }

    int merge_order = 0;
    while (active.size() > 2) {
        const int r = static_cast<int>(active.size());
        std::vector<double> rowsum(static_cast<std::size_t>(r), 0.0);
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b)
                rowsum[static_cast<std::size_t>(a)] += d[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];

        double best_q = std::numeric_limits<double>::infinity();
        int ba = -1, bb = -1;
        for (int a = 0; a < r; ++a) {
            for (int b = a + 1; b < r; ++b) {
                const double q = (r - 2) * d[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] -
                                 rowsum[static_cast<std::size_t>(a)] - rowsum[static_cast<std::size_t>(b)];
                bool better = q < best_q;
                if (q == best_q && ba >= 0) {
                    auto key = [&](int x, int y) {
                        const std::string& p = active[static_cast<std::size_t>(x)].rep;
                        const std::string& q2 = active[static_cast<std::size_t>(y)].rep;
                        return p < q2 ? std::make_pair(p, q2) : std::make_pair(q2, p);
                    };
                    better = key(a, b) < key(ba, bb);
                }
                if (better) {
                    best_q = q;
                    ba = a;
                    bb = b;
                }
            }
        }

        const double dab = d[static_cast<std::size_t>(ba)][static_cast<std::size_t>(bb)];
        double la = 0.5 * dab + (rowsum[static_cast<std::size_t>(ba)] - rowsum[static_cast<std::size_t>(bb)]) /
                                    (2.0 * (r - 2));
        double lb = dab - la;
        la = std::max(0.0, la);
        lb = std::max(0.0, lb);

        GuideTree::Node parent;
        parent.left = active[static_cast<std::size_t>(ba)].node;
        parent.right = active[static_cast<std::size_t>(bb)].node;
        parent.left_len = la;
        parent.right_len = lb;
        parent.merge_order = merge_order++;
        const int pn = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(parent);

        std::vector<double> du(static_cast<std::size_t>(r), 0.0);
        for (int c = 0; c < r; ++c)
            if (c != ba && c != bb)
                du[static_cast<std::size_t>(c)] =
                    0.5 * (d[static_cast<std::size_t>(ba)][static_cast<std::size_t>(c)] +
                           d[static_cast<std::size_t>(bb)][static_cast<std::size_t>(c)] - dab);

        // replace ba with the new cluster, drop bb
        Active merged{pn, std::min(active[static_cast<std::size_t>(ba)].rep,
                                   active[static_cast<std::size_t>(bb)].rep)};
        std::vector<Active> next;
        std::vector<std::vector<double>> nd;
        std::vector<int> keep;
        for (int c = 0; c < r; ++c)
            if (c != ba && c != bb) keep.push_back(c);
        const int nr = static_cast<int>(keep.size()) + 1;
        next.reserve(static_cast<std::size_t>(nr));
        next.push_back(merged);
        for (int c : keep) next.push_back(active[static_cast<std::size_t>(c)]);
        nd.assign(static_cast<std::size_t>(nr), std::vector<double>(static_cast<std::size_t>(nr), 0.0));
        for (int a2 = 0; a2 < static_cast<int>(keep.size()); ++a2) {
            nd[0][static_cast<std::size_t>(a2 + 1)] = du[static_cast<std::size_t>(keep[static_cast<std::size_t>(a2)])];
            nd[static_cast<std::size_t>(a2 + 1)][0] = nd[0][static_cast<std::size_t>(a2 + 1)];
            for (int b2 = 0; b2 < static_cast<int>(keep.size()); ++b2)
                nd[static_cast<std::size_t>(a2 + 1)][static_cast<std::size_t>(b2 + 1)] =
                    d[static_cast<std::size_t>(keep[static_cast<std::size_t>(a2)])]
                     [static_cast<std::size_t>(keep[static_cast<std::size_t>(b2)])];
        }
        active = std::move(next);
        d = std::move(nd);
    }

    // Root at the midpoint of the final edge.
    const double final_d = std::max(0.0, d[0][1]);
    GuideTree::Node root;
    root.left = active[0].node;
    root.right = active[1].node;
    root.left_len = final_d / 2.0;
    root.right_len = final_d / 2.0;
    root.merge_order = merge_order;
    tree.root = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(root);
    return tree;
}

namespace detail {

inline void newick_rec(const GuideTree& t, int n, std::string& out) {
    const auto& node = t.nodes[static_cast<std::size_t>(n)];
    if (t.is_leaf(n)) {
        out += node.label;
        return;
    }
    char buf[48];
    out += '(';
    newick_rec(t, node.left, out);
    std::snprintf(buf, sizeof buf, ":%.6f", node.left_len);
    out += buf;
    out += ',';
    newick_rec(t, node.right, out);
    std::snprintf(buf, sizeof buf, ":%.6f", node.right_len);
    out += buf;
    out += ')';
}

} // namespace detail

inline std::string to_newick(const GuideTree& t) {
    std::string out;
    detail::newick_rec(t, t.root, out);
    out += ";\n";
    return out;
}

} // namespace segmsa
