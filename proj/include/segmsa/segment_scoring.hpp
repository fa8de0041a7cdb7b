#pragma once

#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "segmsa/errors.hpp"
#include "segmsa/neighborhoods.hpp"

namespace segmsa {

enum class PairScheme { Progressive, LinearConsistency, QuadraticConsistency };
enum class GapScheme { ZeroGap, MaxGap };

struct ScoringScheme {
    PairScheme pair_scheme = PairScheme::LinearConsistency;
    GapScheme gap_scheme = GapScheme::MaxGap;
};

namespace detail {

// Arithmetic core of the pair schemes. `direct` is the pair's own bit
// score; `mn_sums` holds the summed bit scores against each mutual
// neighborhood member.
// The direct term is included in the consistency schemes so a pair with an
// empty mutual neighborhood degrades to Progressive instead of scoring 0.
inline double pair_scheme_value(PairScheme scheme, double direct,
                                const std::vector<double>& mn_sums) {
    if (scheme == PairScheme::Progressive) return direct;
    double sum = 0.0;
    for (double v : mn_sums) sum += v;
    const double card = static_cast<double>(mn_sums.size());
    const double factor = scheme == PairScheme::LinearConsistency ? card : card * card;
    return direct + factor * sum;
}

inline double gap_scheme_value(GapScheme scheme, const std::vector<double>& neighborhood_scores) {
    if (scheme == GapScheme::ZeroGap) return 0.0;
    double best = 0.0;
    for (double v : neighborhood_scores) best = std::max(best, v);
    return best;
}

} // namespace detail

// Pair score of (s,t) under the selected scheme. Requires equal types and
// distinct sequences.
inline double score_pair(SegRef s, SegRef t, const NeighborIndex& index, const ScoringScheme& scheme) {
    const auto& views = index.views();
    const Segment& seg_s = views[static_cast<std::size_t>(s.seq)].segments[static_cast<std::size_t>(s.seg)];
    const Segment& seg_t = views[static_cast<std::size_t>(t.seq)].segments[static_cast<std::size_t>(t.seg)];
    if (seg_s.seg_type != seg_t.seg_type)
        throw InternalError("score_pair: segment type mismatch");
    const double direct = index.seg_score(s, t);
    if (scheme.pair_scheme == PairScheme::Progressive)
        return detail::pair_scheme_value(scheme.pair_scheme, direct, {});
    std::vector<double> mn_sums;
    for (const SegRef& u : index.mutual_neighborhood(s, t))
        mn_sums.push_back(index.seg_score(s, u) + index.seg_score(t, u));
    return detail::pair_scheme_value(scheme.pair_scheme, direct, mn_sums);
}

// Gap score of s under the selected scheme: 0, or the best bit score
// between s and its neighborhood (0 when the neighborhood is empty).
inline double score_gap(SegRef s, const NeighborIndex& index, const ScoringScheme& scheme) {
    if (scheme.gap_scheme == GapScheme::ZeroGap) return 0.0;
    std::vector<double> scores;
    for (const SegRef& t : index.neighborhood(s)) scores.push_back(index.seg_score(s, t));
    return detail::gap_scheme_value(scheme.gap_scheme, scores);
}

// All pair and gap scores for neighbor segments; the input of the
// segment-level Needleman-Wunsch.
class SegmentScoreTable {
public:
    void insert_pair(SegRef s, SegRef t, double v) { pair_.emplace(PairKey(s, t), v); }
    void insert_gap(SegRef s, double v) { gap_.emplace(s, v); }

    double pair(SegRef s, SegRef t) const {
        auto it = pair_.find(PairKey(s, t));
        if (it == pair_.end()) throw InternalError("segment score table: missing pair entry");
        return it->second;
    }

    double gap(SegRef s) const {
        auto it = gap_.find(s);
        if (it == gap_.end()) throw InternalError("segment score table: missing gap entry");
        return it->second;
    }

    const std::map<PairKey, double>& pair_entries() const { return pair_; }
    const std::map<SegRef, double>& gap_entries() const { return gap_; }

private:
    std::map<PairKey, double> pair_;
    std::map<SegRef, double> gap_;
};

// Builds the table over all same-type cross-sequence pairs of neighbor
// segments plus the per-segment gap scores.
inline SegmentScoreTable build_score_table(const NeighborIndex& index, const ScoringScheme& scheme) {
    SegmentScoreTable table;
    const auto& views = index.views();
    const int k = index.sequence_count();
    for (int i = 0; i < k; ++i) {
        for (int a : index.neighbor_segs(i)) {
            const SegRef s{i, a};
            table.insert_gap(s, score_gap(s, index, scheme));
            for (int j = i + 1; j < k; ++j) {
                for (int b : index.neighbor_segs(j)) {
                    const SegRef t{j, b};
                    const auto& seg_s =
                        views[static_cast<std::size_t>(i)].segments[static_cast<std::size_t>(a)];
                    const auto& seg_t =
                        views[static_cast<std::size_t>(j)].segments[static_cast<std::size_t>(b)];
                    if (seg_s.seg_type != seg_t.seg_type) continue;
                    table.insert_pair(s, t, score_pair(s, t, index, scheme));
                }
            }
        }
    }
    return table;
}

// Debug dump: "s_id<TAB>t_id<TAB>score" rows, gap scores with t_id "-".
// Segment ids are "<seq_id>/<start>-<end>".
inline std::string dump_score_table_tsv(const SegmentScoreTable& table,
                                        const std::vector<InformativeView>& views) {
    auto seg_id = [&](SegRef r) {
        const auto& v = views[static_cast<std::size_t>(r.seq)];
        const Segment& s = v.segments[static_cast<std::size_t>(r.seg)];
        return v.parent->id + "/" + std::to_string(s.start) + "-" + std::to_string(s.end);
    };
    std::ostringstream out;
    out << "# s_id\tt_id\tscore\n";
    for (const auto& [key, v] : table.pair_entries())
        out << seg_id(key.a) << '\t' << seg_id(key.b) << '\t' << v << '\n';
    for (const auto& [s, v] : table.gap_entries())
        out << seg_id(s) << '\t' << '-' << '\t' << v << '\n';
    return out.str();
}

} // namespace segmsa
