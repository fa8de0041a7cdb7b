#pragma once

#include <limits>
#include <string>
#include <vector>

#include "segmsa/errors.hpp"
#include "segmsa/neighborhoods.hpp"
#include "segmsa/segment_scoring.hpp"

namespace segmsa {

// Intermediate state of the progressive segment alignment: a rectangular
// grid of segment columns over a set of member sequences. An entry is an
// index into that member's neighbor segment list, or -1 for a gap. Columns
// are type-pure and degapping a row recovers that list in order.
struct SegmentProfile {
    std::vector<int> members;
    std::vector<std::vector<int>> columns; // [column][member slot]

    std::size_t width() const { return columns.size(); }

    static SegmentProfile leaf(int member, int neighbor_segs_size) {
        SegmentProfile p;
        p.members = {member};
        for (int s = 0; s < neighbor_segs_size; ++s) p.columns.push_back({s});
        return p;
    }
};

namespace detail {

// Resolves a profile entry to the segment it denotes.
struct ProfileContext {
    const std::vector<InformativeView>* views;
    const std::vector<std::vector<int>>* neighbor_segs; // per sequence

    SegRef seg_ref(int member, int neighbor_segs_index) const {
        return SegRef{member, (*neighbor_segs)[static_cast<std::size_t>(member)]
                                      [static_cast<std::size_t>(neighbor_segs_index)]};
    }
    const Segment& segment(SegRef r) const {
        return (*views)[static_cast<std::size_t>(r.seq)].segments[static_cast<std::size_t>(r.seg)];
    }
    const std::string& column_type(const SegmentProfile& p, const std::vector<int>& col) const {
        for (std::size_t s = 0; s < col.size(); ++s)
            if (col[s] >= 0) return segment(seg_ref(p.members[s], col[s])).seg_type;
        throw InternalError("segment profile: all-gap column");
    }
};

} // namespace detail

/*
 * Segment-level profile NW. Column-column match score is the mean pair
 * score over all non-gap cross pairs (columns are type-pure, so a type
 * mismatch forbids the match outright); a column against a gap scores minus
 * the mean of its entries' gap scores. Tie order matches
 * segment_nw: match, then a gap in P's rows, then a gap in Q's rows.
 */
inline SegmentProfile align_profiles(const SegmentProfile& P, const SegmentProfile& Q,
                                     const std::vector<InformativeView>& views,
                                     const std::vector<std::vector<int>>& neighbor_segs,
                                     const SegmentScoreTable& table, DpStats* stats = nullptr) {
    const detail::ProfileContext ctx{&views, &neighbor_segs};
    const int m = static_cast<int>(P.width());
    const int n = static_cast<int>(Q.width());
    if (stats)
        stats->cells += static_cast<std::uint64_t>(m + 1) * static_cast<std::uint64_t>(n + 1);

    auto pair_score = [&](const std::vector<int>& pc, const std::vector<int>& qc) {
        const std::string& tp = ctx.column_type(P, pc);
        const std::string& tq = ctx.column_type(Q, qc);
        if (tp != tq) return -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        int count = 0;
        for (std::size_t a = 0; a < pc.size(); ++a) {
            if (pc[a] < 0) continue;
            const SegRef s = ctx.seg_ref(P.members[a], pc[a]);
            for (std::size_t b = 0; b < qc.size(); ++b) {
                if (qc[b] < 0) continue;
                sum += table.pair(s, ctx.seg_ref(Q.members[b], qc[b]));
                ++count;
            }
        }
        return sum / count;
    };
    auto gap_score = [&](const SegmentProfile& p, const std::vector<int>& col) {
        double sum = 0.0;
        int count = 0;
        for (std::size_t a = 0; a < col.size(); ++a) {
            if (col[a] < 0) continue;
            sum += table.gap(ctx.seg_ref(p.members[a], col[a]));
            ++count;
        }
        return -sum / count;
    };

    const std::size_t w = static_cast<std::size_t>(n) + 1;
    std::vector<double> M(static_cast<std::size_t>(m + 1) * w, 0.0);
    std::vector<char> move(static_cast<std::size_t>(m + 1) * w, 0);
    for (int j = 1; j <= n; ++j) {
        M[static_cast<std::size_t>(j)] =
            M[static_cast<std::size_t>(j - 1)] + gap_score(Q, Q.columns[static_cast<std::size_t>(j - 1)]);
        move[static_cast<std::size_t>(j)] = 'l';
    }
    for (int i = 1; i <= m; ++i) {
        M[static_cast<std::size_t>(i) * w] =
            M[static_cast<std::size_t>(i - 1) * w] + gap_score(P, P.columns[static_cast<std::size_t>(i - 1)]);
        move[static_cast<std::size_t>(i) * w] = 'u';
    }
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= n; ++j) {
            const std::size_t c = static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j);
            const double diag = M[c - w - 1] + pair_score(P.columns[static_cast<std::size_t>(i - 1)],
                                                          Q.columns[static_cast<std::size_t>(j - 1)]);
            const double left = M[c - 1] + gap_score(Q, Q.columns[static_cast<std::size_t>(j - 1)]);
            const double up = M[c - w] + gap_score(P, P.columns[static_cast<std::size_t>(i - 1)]);
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

    SegmentProfile out;
    out.members = P.members;
    out.members.insert(out.members.end(), Q.members.begin(), Q.members.end());
    const std::size_t pk = P.members.size(), qk = Q.members.size();

    std::vector<std::vector<int>> rev;
    int i = m, j = n;
    while (i > 0 || j > 0) {
        const char mv = move[static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j)];
        std::vector<int> col(pk + qk, -1);
        if (mv == 'd') {
            const auto& pc = P.columns[static_cast<std::size_t>(i - 1)];
            const auto& qc = Q.columns[static_cast<std::size_t>(j - 1)];
            for (std::size_t a = 0; a < pk; ++a) col[a] = pc[a];
            for (std::size_t b = 0; b < qk; ++b) col[pk + b] = qc[b];
            --i;
            --j;
        } else if (mv == 'l') {
            const auto& qc = Q.columns[static_cast<std::size_t>(j - 1)];
            for (std::size_t b = 0; b < qk; ++b) col[pk + b] = qc[b];
            --j;
        } else {
            const auto& pc = P.columns[static_cast<std::size_t>(i - 1)];
            for (std::size_t a = 0; a < pk; ++a) col[a] = pc[a];
            --i;
        }
        rev.push_back(std::move(col));
    }
    out.columns.assign(std::make_move_iterator(rev.rbegin()), std::make_move_iterator(rev.rend()));
    return out;
}

} // namespace segmsa
