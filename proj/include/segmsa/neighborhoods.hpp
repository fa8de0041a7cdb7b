#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segmsa/annotated_sequence.hpp"
#include "segmsa/errors.hpp"
#include "segmsa/pairwise.hpp"
#include "segmsa/threshold.hpp"

namespace segmsa {

// Identifies one informative segment: sequence index and position within
// that sequence's informative segment list.
struct SegRef {
    int seq = -1;
    int seg = -1;

    auto operator<=>(const SegRef&) const = default;
};

// Unordered segment pair, stored in canonical (a < b) order.
struct PairKey {
    SegRef a, b;

    PairKey(SegRef s, SegRef t) {
        if (t < s) std::swap(s, t);
        a = s;
        b = t;
    }
    auto operator<=>(const PairKey&) const = default;
};

// Coordinates and scores of one pairwise segment local alignment. Spans are
// in segment-local coordinates; x belongs to the pair's smaller SegRef.
// An empty optimal alignment carries no information: its seg_score is 0.
struct PairAlignmentInfo {
    int x_start = 0, x_end = 0;
    int y_start = 0, y_end = 0;
    long raw_score = 0;
    double seg_score = 0.0; // segment pair bit score
    bool has_span = false;

    static PairAlignmentInfo from(const LocalAlignment& la) {
        PairAlignmentInfo info;
        info.raw_score = la.raw_score;
        info.has_span = !la.empty();
        info.seg_score = info.has_span ? la.bit_score : 0.0;
        if (info.has_span) {
            info.x_start = la.x_start;
            info.x_end = la.x_end;
            info.y_start = la.y_start;
            info.y_end = la.y_end;
        }
        return info;
    }
};

// Bit scores (and alignment spans) for all cross-sequence pairs of
// informative segments of equal type.
class SegPairScores {
public:
    void insert(SegRef s, SegRef t, PairAlignmentInfo info) { map_.emplace(PairKey(s, t), info); }

    const PairAlignmentInfo* find(SegRef s, SegRef t) const {
        auto it = map_.find(PairKey(s, t));
        return it == map_.end() ? nullptr : &it->second;
    }

    double score(SegRef s, SegRef t) const {
        const PairAlignmentInfo* p = find(s, t);
        if (!p) throw InternalError("segment pair score requested for an unscored pair");
        return p->seg_score;
    }

    // Aligned span of segment s within its local alignment against t,
    // in s-local coordinates. Empty optional when no positive-scoring
    // alignment exists.
    std::optional<std::pair<int, int>> span_of(SegRef s, SegRef t) const {
        const PairAlignmentInfo* p = find(s, t);
        if (!p || !p->has_span) return std::nullopt;
        if (PairKey(s, t).a == s) return std::make_pair(p->x_start, p->x_end);
        return std::make_pair(p->y_start, p->y_end);
    }

    const std::map<PairKey, PairAlignmentInfo>& entries() const { return map_; }
    std::size_t size() const { return map_.size(); }

private:
    std::map<PairKey, PairAlignmentInfo> map_;
};

// Symmetric k x k matrix of pairwise divergence levels, in [0,2] bits per
// aligned column; diagonal unused.
class DivergenceMatrix {
public:
    explicit DivergenceMatrix(int k = 0) : k_(k), d_(static_cast<std::size_t>(k) * k, 0.0) {}

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

namespace detail {

// Deterministic argmax tie-break: smaller start coordinate, then
// lexicographically smaller sequence id.
inline bool tie_before(const std::vector<InformativeView>& views, SegRef a, SegRef b) {
    const Segment& sa = views[static_cast<std::size_t>(a.seq)].segments[static_cast<std::size_t>(a.seg)];
    const Segment& sb = views[static_cast<std::size_t>(b.seq)].segments[static_cast<std::size_t>(b.seg)];
    if (sa.start != sb.start) return sa.start < sb.start;
    return views[static_cast<std::size_t>(a.seq)].parent->id <
           views[static_cast<std::size_t>(b.seq)].parent->id;
}

} // namespace detail

// Scores every cross-sequence pair of informative segments of equal type. Pair order is deterministic; the caller may parallelize the
// underlying alignment calls (see pipeline.hpp) as long as assembly stays
// index-ordered.
inline SegPairScores all_segment_pair_scores(const std::vector<InformativeView>& views,
                                             const LocalAligner& aligner) {
    SegPairScores scores;
    const int k = static_cast<int>(views.size());
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            const auto& vi = views[static_cast<std::size_t>(i)];
            const auto& vj = views[static_cast<std::size_t>(j)];
            for (int a = 0; a < static_cast<int>(vi.segments.size()); ++a) {
                for (int b = 0; b < static_cast<int>(vj.segments.size()); ++b) {
                    const Segment& sa = vi.segments[static_cast<std::size_t>(a)];
                    const Segment& sb = vj.segments[static_cast<std::size_t>(b)];
                    if (sa.seg_type != sb.seg_type) continue;
                    const std::string_view xs{vi.parent->residues};
                    const std::string_view ys{vj.parent->residues};
                    LocalAlignment la = aligner.align(
                        xs.substr(static_cast<std::size_t>(sa.start), static_cast<std::size_t>(sa.length())),
                        ys.substr(static_cast<std::size_t>(sb.start), static_cast<std::size_t>(sb.length())));
                    scores.insert(SegRef{i, a}, SegRef{j, b}, PairAlignmentInfo::from(la));
                }
            }
        }
    }
    return scores;
}

// Divergence level: bit score per aligned column of the local alignment
// between the two informative subsequences, clamped to [0,2]. Empty informative
// sequences or an empty optimal alignment yield 0 with a diagnostic.
inline double divergence(const InformativeView& vi, const InformativeView& vj,
                         const LocalAligner& aligner, std::vector<std::string>* diagnostics = nullptr) {
    if (vi.concatenated.empty() || vj.concatenated.empty()) {
        if (diagnostics)
            diagnostics->push_back("divergence(" + vi.parent->id + "," + vj.parent->id +
                                   "): empty informative sequence, using 0");
        return 0.0;
    }
    const LocalAlignment la = aligner.align(vi.concatenated, vj.concatenated);
    if (la.empty()) {
        if (diagnostics)
            diagnostics->push_back("divergence(" + vi.parent->id + "," + vj.parent->id +
                                   "): empty local alignment, using 0");
        return 0.0;
    }
    const double per_col = la.bit_score / static_cast<double>(la.columns());
    return std::clamp(per_col, 0.0, 2.0);
}

inline DivergenceMatrix build_divergence_matrix(const std::vector<InformativeView>& views,
                                                const LocalAligner& aligner,
                                                std::vector<std::string>* diagnostics = nullptr) {
    const int k = static_cast<int>(views.size());
    DivergenceMatrix d(k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            d.set(i, j, divergence(views[static_cast<std::size_t>(i)],
                                   views[static_cast<std::size_t>(j)], aligner, diagnostics));
    return d;
}

// Neighbor structure: per-segment neighbor sets and closest neighbors,
// per-sequence neighbor segment lists, and the mutual neighborhoods used by
// the consistency scoring schemes.
class NeighborIndex {
public:
    NeighborIndex(const std::vector<InformativeView>& views, const SegPairScores& scores,
                  const DivergenceMatrix& divergences, const ThresholdCurve& curve)
        : views_(&views), scores_(&scores) {
        const int k = static_cast<int>(views.size());
        neighbor_sets_.resize(static_cast<std::size_t>(k));
        closest_.resize(static_cast<std::size_t>(k));
        neighborhoods_.resize(static_cast<std::size_t>(k));
        neighbor_segs_.resize(static_cast<std::size_t>(k));

        std::vector<std::vector<bool>> is_nei(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const std::size_t n = views[static_cast<std::size_t>(i)].segments.size();
            neighbor_sets_[static_cast<std::size_t>(i)].assign(n, {});
            closest_[static_cast<std::size_t>(i)].assign(n, {});
            neighborhoods_[static_cast<std::size_t>(i)].assign(n, {});
            is_nei[static_cast<std::size_t>(i)].assign(n, false);
        }

        for (int i = 0; i < k; ++i) {
            const auto& vi = views[static_cast<std::size_t>(i)];
            for (int a = 0; a < static_cast<int>(vi.segments.size()); ++a) {
                const SegRef s{i, a};
                const Segment& seg_s = vi.segments[static_cast<std::size_t>(a)];
                auto& per_j = neighbor_sets_[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
                auto& cl_j = closest_[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
                per_j.assign(static_cast<std::size_t>(k), {});
                cl_j.assign(static_cast<std::size_t>(k), std::nullopt);
                for (int j = 0; j < k; ++j) {
                    if (j == i) continue;
                    const auto& vj = views[static_cast<std::size_t>(j)];
                    const double bar = curve(divergences.at(i, j)) * seg_s.length();
                    std::optional<SegRef> best;
                    double best_score = 0.0;
                    for (int b = 0; b < static_cast<int>(vj.segments.size()); ++b) {
                        const SegRef t{j, b};
                        if (vj.segments[static_cast<std::size_t>(b)].seg_type != seg_s.seg_type)
                            continue;
                        const double sc = scores.score(s, t);
                        if (sc < bar) continue;
                        per_j[static_cast<std::size_t>(j)].push_back(t);
                        is_nei[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)] = true;
                        if (!best || sc > best_score ||
                            (sc == best_score && detail::tie_before(views, t, *best))) {
                            best = t;
                            best_score = sc;
                        }
                    }
                    cl_j[static_cast<std::size_t>(j)] = best;
                    if (best) neighborhoods_[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)].push_back(*best);
                }
            }
        }

        for (int i = 0; i < k; ++i)
            for (int a = 0; a < static_cast<int>(views[static_cast<std::size_t>(i)].segments.size()); ++a)
                if (is_nei[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)])
                    neighbor_segs_[static_cast<std::size_t>(i)].push_back(a);
    }

    // Neighbors of s in sequence j: informative segments of s's type whose
    // bit score against s clears the divergence-scaled threshold.
    const std::vector<SegRef>& neighbors(SegRef s, int j) const {
        return neighbor_sets_[static_cast<std::size_t>(s.seq)][static_cast<std::size_t>(s.seg)]
                             [static_cast<std::size_t>(j)];
    }

    std::optional<SegRef> closest_neighbor(SegRef s, int j) const {
        return closest_[static_cast<std::size_t>(s.seq)][static_cast<std::size_t>(s.seg)]
                       [static_cast<std::size_t>(j)];
    }

    // Neighborhood(s): union of closest neighbors over all other sequences.
    const std::vector<SegRef>& neighborhood(SegRef s) const {
        return neighborhoods_[static_cast<std::size_t>(s.seq)][static_cast<std::size_t>(s.seg)];
    }

    // Informative segment indices of sequence i that are neighbors of some
    // segment of another sequence, in parent order.
    const std::vector<int>& neighbor_segs(int i) const { return neighbor_segs_[static_cast<std::size_t>(i)]; }

    bool is_neighbor_segment(SegRef s) const {
        const auto& v = neighbor_segs_[static_cast<std::size_t>(s.seq)];
        return std::binary_search(v.begin(), v.end(), s.seg);
    }

    // Mutual neighbors of s and t in sequence l: l's neighbor segments that
    // are neighbors of both.
    std::vector<SegRef> mutual_neighbors(int l, SegRef s, SegRef t) const {
        std::vector<SegRef> out;
        const auto& ns = neighbors(s, l);
        const auto& nt = neighbors(t, l);
        for (const SegRef& u : ns) {
            if (!is_neighbor_segment(u)) continue;
            if (std::find(nt.begin(), nt.end(), u) != nt.end()) out.push_back(u);
        }
        return out;
    }

    // The mutual neighbor in sequence l maximizing the summed bit scores
    // against s and t, ties broken by start then sequence id.
    std::optional<SegRef> closest_mutual_neighbor(int l, SegRef s, SegRef t) const {
        std::optional<SegRef> best;
        double best_sum = 0.0;
        for (const SegRef& u : mutual_neighbors(l, s, t)) {
            const double sum = scores_->score(s, u) + scores_->score(t, u);
            if (!best || sum > best_sum || (sum == best_sum && detail::tie_before(*views_, u, *best))) {
                best = u;
                best_sum = sum;
            }
        }
        return best;
    }

    // Union of the closest mutual neighbors over all third sequences.
    std::vector<SegRef> mutual_neighborhood(SegRef s, SegRef t) const {
        std::vector<SegRef> out;
        for (int l = 0; l < static_cast<int>(views_->size()); ++l) {
            if (l == s.seq || l == t.seq) continue;
            if (auto u = closest_mutual_neighbor(l, s, t)) out.push_back(*u);
        }
        return out;
    }

    double seg_score(SegRef s, SegRef t) const { return scores_->score(s, t); }
    const SegPairScores& scores() const { return *scores_; }
    const std::vector<InformativeView>& views() const { return *views_; }
    int sequence_count() const { return static_cast<int>(views_->size()); }

private:
    const std::vector<InformativeView>* views_;
    const SegPairScores* scores_;
    // [seq][seg][other_seq] -> sorted neighbor list / closest neighbor
    std::vector<std::vector<std::vector<std::vector<SegRef>>>> neighbor_sets_;
    std::vector<std::vector<std::vector<std::optional<SegRef>>>> closest_;
    std::vector<std::vector<std::vector<SegRef>>> neighborhoods_;
    std::vector<std::vector<int>> neighbor_segs_;
};

inline NeighborIndex build_neighbor_index(const std::vector<InformativeView>& views,
                                          const SegPairScores& scores,
                                          const DivergenceMatrix& divergences,
                                          const ThresholdCurve& curve) {
    return NeighborIndex(views, scores, divergences, curve);
}

} // namespace segmsa
