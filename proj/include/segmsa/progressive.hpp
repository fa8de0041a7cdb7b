#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segmsa/errors.hpp"
#include "segmsa/guide_tree.hpp"
#include "segmsa/msa.hpp"
#include "segmsa/neighborhoods.hpp"
#include "segmsa/residue_profile.hpp"
#include "segmsa/segment_profile.hpp"
#include "segmsa/segment_scoring.hpp"

namespace segmsa {

// Everything assemble_msa needs besides the root profile.
struct AssemblyContext {
    const std::vector<AnnotatedSequence>* sequences = nullptr;
    const std::vector<InformativeView>* views = nullptr;
    const std::vector<std::vector<int>>* neighbor_segs = nullptr;
    const SegPairScores* scores = nullptr;
    const GuideTree* tree = nullptr;
    const SubstitutionMatrix* matrix = nullptr;
    GapPenalties gaps;
    DpStats* residue_stats = nullptr;
    std::vector<std::string>* diagnostics = nullptr;
};

// Progressive segment-level MSA: merges leaf profiles pairwise along the
// guide tree's join order and returns the root profile over all members.
inline SegmentProfile build_segment_msa(const GuideTree& tree,
                                        const std::vector<InformativeView>& views,
                                        const std::vector<std::vector<int>>& neighbor_segs,
                                        const SegmentScoreTable& table, DpStats* stats = nullptr) {
    std::vector<SegmentProfile> profiles(tree.nodes.size());
    for (int n = 0; n < static_cast<int>(tree.nodes.size()); ++n)
        if (tree.is_leaf(n)) {
            const int seq = tree.nodes[static_cast<std::size_t>(n)].seq;
            profiles[static_cast<std::size_t>(n)] = SegmentProfile::leaf(
                seq, static_cast<int>(neighbor_segs[static_cast<std::size_t>(seq)].size()));
        }
    for (int n : tree.merge_sequence()) {
        const auto& node = tree.nodes[static_cast<std::size_t>(n)];
        profiles[static_cast<std::size_t>(n)] =
            align_profiles(profiles[static_cast<std::size_t>(node.left)],
                           profiles[static_cast<std::size_t>(node.right)], views, neighbor_segs, table, stats);
        profiles[static_cast<std::size_t>(node.left)] = {};
        profiles[static_cast<std::size_t>(node.right)] = {};
    }
    return std::move(profiles[static_cast<std::size_t>(tree.root)]);
}

// The pairwise stitch primitive: global residue alignment of the two gap
// regions between consecutive matched segments. Empty regions come out as
// pure-gap insertions against the other side.
inline ResidueAlignment stitch(std::string_view region_i, std::string_view region_j,
                               const SubstitutionMatrix& matrix, const GapPenalties& gaps,
                               DpStats* stats = nullptr) {
    return global_align_residues(region_i, region_j, matrix, gaps, stats);
}

namespace detail {

// One member's placement inside a matched segment block: which residues of
// the parent sequence go in, and at which column offset.
struct CorePlacement {
    int abs_start = 0; // parent coordinates, half open
    int abs_end = 0;
    int offset = 0;    // column offset within the block
};

// Residue layout of one matched segment column. Cores are the segment spans
// covered by the pairwise local alignment against the column's anchor
// segment, projected onto the anchor's coordinates; unaligned segment heads
// and tails spill into the adjacent stitch regions. Members absent from the
// column get all-gap rows.
struct BlockLayout {
    std::map<int, CorePlacement> placements; // member -> placement
    int width = 0;
};

inline BlockLayout layout_block(const SegmentProfile& profile, const std::vector<int>& column,
                                const AssemblyContext& ctx) {
    const auto& views = *ctx.views;
    const auto& neighbor_segs = *ctx.neighbor_segs;

    std::vector<std::pair<int, SegRef>> present; // (member, segment)
    for (std::size_t slot = 0; slot < column.size(); ++slot) {
        if (column[slot] < 0) continue;
        const int member = profile.members[slot];
        present.emplace_back(member, SegRef{member, neighbor_segs[static_cast<std::size_t>(member)]
                                                         [static_cast<std::size_t>(column[slot])]});
    }
    if (present.empty()) throw InternalError("matched block with no members");

    auto seg_of = [&](SegRef r) -> const Segment& {
        return views[static_cast<std::size_t>(r.seq)].segments[static_cast<std::size_t>(r.seg)];
    };

    BlockLayout layout;

    // Anchor: the member segment with the highest total bit score to the
    // rest of the column; ties keep the first member in profile order.
    int anchor_pos = 0;
    double anchor_best = -1.0;
    for (std::size_t a = 0; a < present.size(); ++a) {
        double total = 0.0;
        for (std::size_t b = 0; b < present.size(); ++b)
            if (a != b) total += ctx.scores->score(present[a].second, present[b].second);
        if (total > anchor_best) {
            anchor_best = total;
            anchor_pos = static_cast<int>(a);
        }
    }
    const SegRef anchor = present[static_cast<std::size_t>(anchor_pos)].second;
    const Segment& anchor_seg = seg_of(anchor);

    // Anchor core: the union of anchor spans covered by any member's local
    // alignment; full segment when nothing aligned.
    int a_lo = anchor_seg.length(), a_hi = 0;
    struct MemberSpan {
        int member;
        SegRef ref;
        std::optional<std::pair<int, int>> own;    // member-local core
        std::optional<std::pair<int, int>> anchor; // anchor span it maps to
    };
    std::vector<MemberSpan> spans;
    for (const auto& [member, ref] : present) {
        if (ref == anchor) continue;
        MemberSpan ms{member, ref, ctx.scores->span_of(ref, anchor), ctx.scores->span_of(anchor, ref)};
        if (ms.anchor) {
            a_lo = std::min(a_lo, ms.anchor->first);
            a_hi = std::max(a_hi, ms.anchor->second);
        }
        spans.push_back(ms);
    }
    if (a_lo >= a_hi) {
        a_lo = 0;
        a_hi = anchor_seg.length();
    }

    layout.placements[anchor.seq] = {anchor_seg.start + a_lo, anchor_seg.start + a_hi, 0};
    layout.width = a_hi - a_lo;
    for (const MemberSpan& ms : spans) {
        const Segment& s = seg_of(ms.ref);
        CorePlacement p;
        if (ms.own && ms.anchor) {
            p.abs_start = s.start + ms.own->first;
            p.abs_end = s.start + ms.own->second;
            p.offset = ms.anchor->first - a_lo;
        } else {
            p.abs_start = s.start;
            p.abs_end = s.end;
            p.offset = 0;
        }
        layout.placements[ms.member] = p;
        layout.width = std::max(layout.width, p.offset + (p.abs_end - p.abs_start));
    }
    return layout;
}

// Progressive residue alignment of one stitch region: each member
// contributes a (possibly empty) substring; profiles are merged in guide
// tree order.
inline std::vector<std::string> align_region(const std::map<int, std::string>& region,
                                             const AssemblyContext& ctx,
                                             std::vector<int>& member_order) {
    const GuideTree& tree = *ctx.tree;
    std::vector<ResidueProfile> profiles(tree.nodes.size());
    for (int n = 0; n < static_cast<int>(tree.nodes.size()); ++n)
        if (tree.is_leaf(n)) {
            const int seq = tree.nodes[static_cast<std::size_t>(n)].seq;
            profiles[static_cast<std::size_t>(n)] = ResidueProfile::leaf(seq, region.at(seq));
        }
    for (int n : tree.merge_sequence()) {
        const auto& node = tree.nodes[static_cast<std::size_t>(n)];
        profiles[static_cast<std::size_t>(n)] = align_residue_profiles(
            profiles[static_cast<std::size_t>(node.left)], profiles[static_cast<std::size_t>(node.right)],
            *ctx.matrix, ctx.gaps, ctx.residue_stats);
        profiles[static_cast<std::size_t>(node.left)] = {};
        profiles[static_cast<std::size_t>(node.right)] = {};
    }
    ResidueProfile& root = profiles[static_cast<std::size_t>(tree.root)];
    member_order = root.members;
    return std::move(root.rows);
}

} // namespace detail

/*
 * Builds the residue-level MSA from the root segment profile.
 *
 * Matched columns (two or more members) become residue blocks laid out from
 * the pairwise local-alignment cores; the residues between consecutive
 * blocks, including unmatched segments and the unaligned heads/tails of
 * matched segments, form the stitch regions that are aligned by progressive
 * residue NW along the same guide tree. Single-member columns dissolve into
 * their surrounding region.
 */
inline Msa assemble_msa(const SegmentProfile& root, const AssemblyContext& ctx) {
    const auto& sequences = *ctx.sequences;
    const int k = static_cast<int>(sequences.size());

    std::vector<std::size_t> matched_cols;
    for (std::size_t c = 0; c < root.width(); ++c) {
        int non_gap = 0;
        for (int e : root.columns[c])
            if (e >= 0) ++non_gap;
        if (non_gap >= 2) matched_cols.push_back(c);
    }
    if (matched_cols.empty() && k > 1 && ctx.diagnostics)
        ctx.diagnostics->push_back(
            "no matched informative segments; falling back to plain progressive residue alignment");

    std::vector<detail::BlockLayout> blocks;
    blocks.reserve(matched_cols.size());
    for (std::size_t c : matched_cols)
        blocks.push_back(detail::layout_block(root, root.columns[c], ctx));

    std::vector<std::string> rows(static_cast<std::size_t>(k));
    std::vector<int> pos(static_cast<std::size_t>(k), 0);

    auto append_region = [&](const std::map<int, std::string>& region) {
        bool any = false;
        for (const auto& [m, s] : region)
            if (!s.empty()) any = true;
        if (!any) return;
        std::vector<int> member_order;
        std::vector<std::string> aligned = detail::align_region(region, ctx, member_order);
        for (std::size_t r = 0; r < member_order.size(); ++r)
            rows[static_cast<std::size_t>(member_order[r])] += aligned[r];
    };

    for (const detail::BlockLayout& block : blocks) {
        // Stitch region in front of this block: everything between each
        // member's cursor and its core start (members without a core here
        // contribute nothing and keep accumulating).
        std::map<int, std::string> region;
        for (int m = 0; m < k; ++m) {
            auto it = block.placements.find(m);
            if (it == block.placements.end()) {
                region[m] = "";
                continue;
            }
            const auto& p = it->second;
            if (p.abs_start < pos[static_cast<std::size_t>(m)])
                throw InternalError("assemble_msa: segment cores out of order");
            region[m] = sequences[static_cast<std::size_t>(m)].residues.substr(
                static_cast<std::size_t>(pos[static_cast<std::size_t>(m)]),
                static_cast<std::size_t>(p.abs_start - pos[static_cast<std::size_t>(m)]));
        }
        append_region(region);

        for (int m = 0; m < k; ++m) {
            auto it = block.placements.find(m);
            if (it == block.placements.end()) {
                rows[static_cast<std::size_t>(m)].append(static_cast<std::size_t>(block.width), kGapChar);
                continue;
            }
            const auto& p = it->second;
            std::string piece(static_cast<std::size_t>(block.width), kGapChar);
            const std::string& res = sequences[static_cast<std::size_t>(m)].residues;
            for (int q = p.abs_start; q < p.abs_end; ++q)
                piece[static_cast<std::size_t>(p.offset + (q - p.abs_start))] =
                    res[static_cast<std::size_t>(q)];
            rows[static_cast<std::size_t>(m)] += piece;
            pos[static_cast<std::size_t>(m)] = p.abs_end;
        }
    }

    std::map<int, std::string> tail;
    for (int m = 0; m < k; ++m)
        tail[m] = sequences[static_cast<std::size_t>(m)].residues.substr(
            static_cast<std::size_t>(pos[static_cast<std::size_t>(m)]));
    append_region(tail);

    Msa msa;
    for (int m = 0; m < k; ++m) {
        msa.ids.push_back(sequences[static_cast<std::size_t>(m)].id);
        msa.rows.push_back(std::move(rows[static_cast<std::size_t>(m)]));
    }
    msa.validate();
    for (int m = 0; m < k; ++m)
        if (degap(msa.rows[static_cast<std::size_t>(m)]) != sequences[static_cast<std::size_t>(m)].residues)
            throw InternalError("assemble_msa: row does not degap to its sequence ('" +
                                sequences[static_cast<std::size_t>(m)].id + "')");
    return msa;
}

} // namespace segmsa
