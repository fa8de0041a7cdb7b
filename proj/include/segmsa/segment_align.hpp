#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "segmsa/neighborhoods.hpp"
#include "segmsa/segment_scoring.hpp"

namespace segmsa {

// Global segment alignment of two neighbor sequences: columns pair an index
// into bi, bj, or -1 for a gap. Matches require equal segment types.
struct SegmentAlignment {
    std::vector<std::pair<int, int>> columns;
    double score = 0.0;
};

// Needleman-Wunsch over segments. Matches add the table's pair score and
// are allowed only for equal types; a segment against a gap subtracts its
// gap score. Ties in
// the traceback prefer match, then a gap in i's row, then a gap in j's row,
// which makes the all-tie layout canonical: bi's segments first, then bj's.
inline SegmentAlignment segment_nw(const std::vector<SegRef>& bi, const std::vector<SegRef>& bj,
                                   const std::vector<InformativeView>& views,
                                   const SegmentScoreTable& table, DpStats* stats = nullptr) {
    const int m = static_cast<int>(bi.size());
    const int n = static_cast<int>(bj.size());
    if (stats)
        stats->cells += static_cast<std::uint64_t>(m + 1) * static_cast<std::uint64_t>(n + 1);

    auto seg_of = [&](SegRef r) -> const Segment& {
        return views[static_cast<std::size_t>(r.seq)].segments[static_cast<std::size_t>(r.seg)];
    };

    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const std::size_t w = static_cast<std::size_t>(n) + 1;
    std::vector<double> M(static_cast<std::size_t>(m + 1) * w, 0.0);
    std::vector<char> move(static_cast<std::size_t>(m + 1) * w, 0); // 'd','l','u'

    for (int j = 1; j <= n; ++j) {
        M[static_cast<std::size_t>(j)] =
            M[static_cast<std::size_t>(j - 1)] - table.gap(bj[static_cast<std::size_t>(j - 1)]);
        move[static_cast<std::size_t>(j)] = 'l';
    }
    for (int i = 1; i <= m; ++i) {
        M[static_cast<std::size_t>(i) * w] =
            M[static_cast<std::size_t>(i - 1) * w] - table.gap(bi[static_cast<std::size_t>(i - 1)]);
        move[static_cast<std::size_t>(i) * w] = 'u';
    }

    for (int i = 1; i <= m; ++i) {
        const SegRef s = bi[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= n; ++j) {
            const SegRef t = bj[static_cast<std::size_t>(j - 1)];
            const std::size_t c = static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j);
            double diag = kNegInf;
            if (seg_of(s).seg_type == seg_of(t).seg_type)
                diag = M[c - w - 1] + table.pair(s, t);
            const double left = M[c - 1] - table.gap(t);
            const double up = M[c - w] - table.gap(s);
            if (diag >= left && diag >= up) {
                M[c] = diag;
                move[c] = 'd';
            } else if (left >= up) {
                M[c] = left;
                move[c] = 'l';
            } else {
                M[c] = up;
                move[c] = 'u';
            }
        }
    }

    SegmentAlignment out;
    out.score = M[static_cast<std::size_t>(m) * w + static_cast<std::size_t>(n)];
    int i = m, j = n;
    std::vector<std::pair<int, int>> rev;
    while (i > 0 || j > 0) {
        const char mv = move[static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j)];
        if (mv == 'd') {
            rev.emplace_back(i - 1, j - 1);
            --i;
            --j;
        } else if (mv == 'l') {
            rev.emplace_back(-1, j - 1);
            --j;
        } else {
            rev.emplace_back(i - 1, -1);
            --i;
        }
    }
    out.columns.assign(rev.rbegin(), rev.rend());
    return out;
}

// Symmetric k x k distance matrix with zero diagonal.
class DistanceMatrix {
public:
    explicit DistanceMatrix(int k = 0) : k_(k), d_(static_cast<std::size_t>(k) * k, 0.0) {}

    double at(int i, int j) const { return d_[static_cast<std::size_t>(i) * k_ + j]; }
    void set(int i, int j, double v) {
        d_[static_cast<std::size_t>(i) * k_ + j] = v;
        d_[static_cast<std::size_t>(j) * k_ + i] = v;
    }
    int size() const { return k_; }

private:
    int k_;
    std::vector<double> d_;
};

// Distances from global segment alignment scores: negative scores floor at 0,
// then D(i,j) = 1 - G(i,j) / max G. A signal-free input (max 0) falls back
// to uniform distances with a diagnostic.
inline DistanceMatrix build_distance_matrix(const std::vector<std::vector<double>>& g,
                                            std::vector<std::string>* diagnostics = nullptr) {
    const int k = static_cast<int>(g.size());
    DistanceMatrix d(k);
    double gmax = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            gmax = std::max(gmax, std::max(0.0, g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
    if (gmax <= 0.0) {
        if (diagnostics && k > 1)
            diagnostics->push_back(
                "distance matrix: no positive segment alignment score anywhere, using uniform distances");
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) d.set(i, j, 1.0);
        return d;
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const double gij = std::max(0.0, g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            d.set(i, j, 1.0 - gij / gmax);
        }
    return d;
}

// PHYLIP square matrix format, for external tree tools.
inline std::string write_phylip(const DistanceMatrix& d, const std::vector<std::string>& ids) {
    std::string out = "    " + std::to_string(d.size()) + "\n";
    char buf[64];
    for (int i = 0; i < d.size(); ++i) {
        std::string name = ids[static_cast<std::size_t>(i)];
        if (name.size() < 10) name.resize(10, ' ');
        out += name;
        for (int j = 0; j < d.size(); ++j) {
            std::snprintf(buf, sizeof buf, "  %.6f", d.at(i, j));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace segmsa
