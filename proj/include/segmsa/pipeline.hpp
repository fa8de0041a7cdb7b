#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "segmsa/annotated_sequence.hpp"
#include "segmsa/errors.hpp"
#include "segmsa/evaluation.hpp"
#include "segmsa/guide_tree.hpp"
#include "segmsa/msa.hpp"
#include "segmsa/neighborhoods.hpp"
#include "segmsa/pairwise.hpp"
#include "segmsa/progressive.hpp"
#include "segmsa/segment_align.hpp"
#include "segmsa/segment_profile.hpp"
#include "segmsa/segment_scoring.hpp"
#include "segmsa/threshold.hpp"

namespace segmsa {

enum class OutputFormat { Fasta, Clustal };

// Pipeline configuration (alpha, the local aligner H, and the threshold
// curve c, plus scheme and gap knobs). Defaults: alpha 6, minimum
// informative length 5, merge gap 4, BLOSUM62 with gap penalties 11/1,
// linear consistency + max gap scoring.
struct Config {
    double alpha = 6.0;
    int min_seg_len = 5;
    int merge_gap = 4;
    PairScheme pair_scheme = PairScheme::LinearConsistency;
    GapScheme gap_scheme = GapScheme::MaxGap;
    std::string threshold_curve_file; // empty: built-in curve
    std::string matrix_file;          // empty: bundled BLOSUM62
    GapPenalties gaps{11, 1};
    BitScoreParams bit_params{};
    OutputFormat out_format = OutputFormat::Fasta;
    int threads = 1;
    unsigned long seed = 0; // reserved; the pipeline is deterministic
};

struct StageTiming {
    std::string name;
    double ms = 0.0;
};

struct RunStats {
    std::vector<StageTiming> timings;
    std::uint64_t local_align_cells = 0;
    std::uint64_t segment_nw_cells = 0;
    std::uint64_t residue_nw_cells = 0;
    std::vector<std::string> diagnostics;
    bool residue_fallback = false;

    double total_ms() const {
        double t = 0.0;
        for (const auto& s : timings) t += s.ms;
        return t;
    }
};

// Self-contained result: owns the input sequences so the internal views stay
// valid for the lifetime of the result.
struct AlignResult {
    std::vector<AnnotatedSequence> sequences;
    std::vector<InformativeView> views;
    std::vector<std::vector<int>> neighbor_segs;
    SegPairScores scores;
    DivergenceMatrix divergences{0};
    SegmentScoreTable table;
    DistanceMatrix distances{0};
    GuideTree tree;
    Msa msa;
    RunStats stats;
};

// Deterministic parallel map: tasks are indexed, results land by index, so
// the outcome is independent of the schedule.
template <typename Fn>
inline void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int t = std::min<int>(threads, static_cast<int>(n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

namespace detail {

class StageClock {
public:
    explicit StageClock(RunStats& stats) : stats_(&stats) {}

    void lap(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        stats_->timings.push_back({name, ms});
        last_ = now;
    }

private:
    RunStats* stats_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline GuideTree single_leaf_tree(const std::string& id) {
    GuideTree t;
    t.leaf_count = 1;
    t.nodes.push_back({-1, -1, 0.0, 0.0, 0, id, -1});
    t.root = 0;
    return t;
}

} // namespace detail

inline const SubstitutionMatrix& resolve_matrix(const Config& cfg,
                                                std::unique_ptr<SubstitutionMatrix>& holder) {
    if (cfg.matrix_file.empty()) return SubstitutionMatrix::blosum62();
    std::ifstream in(cfg.matrix_file);
    if (!in) throw InputError("cannot open matrix file '" + cfg.matrix_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    holder = std::make_unique<SubstitutionMatrix>(
        SubstitutionMatrix::parse_ncbi(ss.str(), cfg.matrix_file));
    return *holder;
}

inline ThresholdCurve resolve_curve(const Config& cfg) {
    if (cfg.threshold_curve_file.empty()) return ThresholdCurve::default_curve();
    std::ifstream in(cfg.threshold_curve_file);
    if (!in) throw InputError("cannot open threshold curve file '" + cfg.threshold_curve_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ThresholdCurve::parse(ss.str());
}

/*
 * The full segment pipeline: classify informative segments, score all
 * same-type segment pairs with H, estimate divergences, build the neighbor
 * index, fill the score table, align neighbor sequences at the segment
 * level, build the NJ guide tree, progressively merge segment profiles, and
 * stitch the remaining residues back in.
 */
inline AlignResult run_align(std::vector<AnnotatedSequence> sequences, const Config& cfg,
                             const LocalAligner* custom_h = nullptr) {
    if (sequences.empty()) throw InputError("run_align: no sequences");
    AlignResult result;
    result.sequences = std::move(sequences);
    const int k = static_cast<int>(result.sequences.size());
    detail::StageClock clock(result.stats);

    std::unique_ptr<SubstitutionMatrix> matrix_holder;
    const SubstitutionMatrix& matrix = resolve_matrix(cfg, matrix_holder);
    const ThresholdCurve curve = resolve_curve(cfg);
    SmithWatermanAligner default_h(matrix, cfg.gaps, cfg.bit_params);
    const LocalAligner& H = custom_h ? *custom_h : static_cast<const LocalAligner&>(default_h);

    // informative segment classification
    for (const auto& s : result.sequences)
        result.views.push_back(classify_informative(s, cfg.alpha, cfg.min_seg_len, cfg.merge_gap));
    clock.lap("classify_informative");

    // bit scores for all same-type cross pairs of informative segments
    {
        struct Task {
            SegRef s, t;
            const Segment *seg_s, *seg_t;
        };
        std::vector<Task> tasks;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                const auto& vi = result.views[static_cast<std::size_t>(i)];
                const auto& vj = result.views[static_cast<std::size_t>(j)];
                for (int a = 0; a < static_cast<int>(vi.segments.size()); ++a)
                    for (int b = 0; b < static_cast<int>(vj.segments.size()); ++b) {
                        const Segment& sa = vi.segments[static_cast<std::size_t>(a)];
                        const Segment& sb = vj.segments[static_cast<std::size_t>(b)];
                        if (sa.seg_type != sb.seg_type) continue;
                        tasks.push_back({SegRef{i, a}, SegRef{j, b}, &sa, &sb});
                    }
            }
        std::vector<PairAlignmentInfo> infos(tasks.size());
        parallel_for(tasks.size(), cfg.threads, [&](std::size_t idx) {
            const Task& t = tasks[idx];
            const std::string& xs = result.sequences[static_cast<std::size_t>(t.s.seq)].residues;
            const std::string& ys = result.sequences[static_cast<std::size_t>(t.t.seq)].residues;
            const LocalAlignment la =
                H.align(std::string_view(xs).substr(static_cast<std::size_t>(t.seg_s->start),
                                                    static_cast<std::size_t>(t.seg_s->length())),
                        std::string_view(ys).substr(static_cast<std::size_t>(t.seg_t->start),
                                                    static_cast<std::size_t>(t.seg_t->length())));
            infos[idx] = PairAlignmentInfo::from(la);
        });
        for (std::size_t idx = 0; idx < tasks.size(); ++idx) {
            result.scores.insert(tasks[idx].s, tasks[idx].t, infos[idx]);
            result.stats.local_align_cells +=
                static_cast<std::uint64_t>(tasks[idx].seg_s->length()) *
                static_cast<std::uint64_t>(tasks[idx].seg_t->length());
        }
    }
    clock.lap("segment_pair_scores");

    // pairwise divergence levels
    {
        result.divergences = DivergenceMatrix(k);
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
        std::vector<double> vals(pairs.size());
        std::vector<std::vector<std::string>> diags(pairs.size());
        parallel_for(pairs.size(), cfg.threads, [&](std::size_t idx) {
            const auto& [i, j] = pairs[idx];
            vals[idx] = divergence(result.views[static_cast<std::size_t>(i)],
                                   result.views[static_cast<std::size_t>(j)], H, &diags[idx]);
        });
        for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
            result.divergences.set(pairs[idx].first, pairs[idx].second, vals[idx]);
            for (auto& d : diags[idx]) result.stats.diagnostics.push_back(std::move(d));
            result.stats.local_align_cells +=
                static_cast<std::uint64_t>(
                    result.views[static_cast<std::size_t>(pairs[idx].first)].concatenated.size()) *
                static_cast<std::uint64_t>(
                    result.views[static_cast<std::size_t>(pairs[idx].second)].concatenated.size());
        }
    }
    clock.lap("divergence");

    // neighbors, closest neighbors, neighbor sequences, mutual sets
    NeighborIndex index(result.views, result.scores, result.divergences, curve);
    for (int i = 0; i < k; ++i) result.neighbor_segs.push_back(index.neighbor_segs(i));
    clock.lap("neighbor_index");

    // pair and gap score table
    result.table = build_score_table(index, ScoringScheme{cfg.pair_scheme, cfg.gap_scheme});
    clock.lap("score_table");

    // distances from pairwise global segment alignments
    {
        std::vector<std::vector<double>> g(static_cast<std::size_t>(k),
                                           std::vector<double>(static_cast<std::size_t>(k), 0.0));
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
        std::vector<double> scores(pairs.size());
        std::vector<DpStats> stats(pairs.size());
        parallel_for(pairs.size(), cfg.threads, [&](std::size_t idx) {
            const auto& [i, j] = pairs[idx];
            std::vector<SegRef> bi, bj;
            for (int a : result.neighbor_segs[static_cast<std::size_t>(i)]) bi.push_back(SegRef{i, a});
            for (int b : result.neighbor_segs[static_cast<std::size_t>(j)]) bj.push_back(SegRef{j, b});
            scores[idx] = segment_nw(bi, bj, result.views, result.table, &stats[idx]).score;
        });
        for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
            g[static_cast<std::size_t>(pairs[idx].first)][static_cast<std::size_t>(pairs[idx].second)] =
                scores[idx];
            result.stats.segment_nw_cells += stats[idx].cells;
        }
        result.distances = build_distance_matrix(g, &result.stats.diagnostics);
    }
    clock.lap("segment_distances");

    // guide tree
    if (k == 1) {
        result.tree = detail::single_leaf_tree(result.sequences.front().id);
    } else {
        std::vector<std::string> ids;
        for (const auto& s : result.sequences) ids.push_back(s.id);
        result.tree = neighbor_joining(result.distances, ids);
    }
    clock.lap("guide_tree");

    // progressive segment-level MSA
    DpStats seg_stats;
    SegmentProfile root = build_segment_msa(result.tree, result.views, result.neighbor_segs, result.table,
                                            &seg_stats);
    result.stats.segment_nw_cells += seg_stats.cells;
    clock.lap("segment_msa");

    // stitch the remaining residues back in
    {
        DpStats res_stats;
        AssemblyContext ctx;
        ctx.sequences = &result.sequences;
        ctx.views = &result.views;
        ctx.neighbor_segs = &result.neighbor_segs;
        ctx.scores = &result.scores;
        ctx.tree = &result.tree;
        ctx.matrix = &matrix;
        ctx.gaps = cfg.gaps;
        ctx.residue_stats = &res_stats;
        ctx.diagnostics = &result.stats.diagnostics;
        const std::size_t diag_before = result.stats.diagnostics.size();
        result.msa = assemble_msa(root, ctx);
        result.stats.residue_nw_cells += res_stats.cells;
        result.stats.residue_fallback = result.stats.diagnostics.size() > diag_before;
    }
    clock.lap("stitch_assemble");

    return result;
}

// Plain progressive residue-level MSA over the full sequences: pairwise
// global scores -> distances -> NJ -> profile merges. This is the baseline
// the segment pipeline is measured against.
inline Msa residue_progressive_align(const std::vector<AnnotatedSequence>& sequences,
                                     const Config& cfg, RunStats* stats = nullptr) {
    const int k = static_cast<int>(sequences.size());
    if (k == 0) throw InputError("residue_progressive_align: no sequences");
    std::unique_ptr<SubstitutionMatrix> matrix_holder;
    const SubstitutionMatrix& matrix = resolve_matrix(cfg, matrix_holder);

    GuideTree tree;
    DpStats dp;
    if (k == 1) {
        tree = detail::single_leaf_tree(sequences.front().id);
    } else {
        std::vector<std::vector<double>> g(static_cast<std::size_t>(k),
                                           std::vector<double>(static_cast<std::size_t>(k), 0.0));
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
        std::vector<double> scores(pairs.size());
        std::vector<DpStats> pair_stats(pairs.size());
        parallel_for(pairs.size(), cfg.threads, [&](std::size_t idx) {
            const auto& [i, j] = pairs[idx];
            scores[idx] = global_score_only(sequences[static_cast<std::size_t>(i)].residues,
                                            sequences[static_cast<std::size_t>(j)].residues, matrix,
                                            cfg.gaps, &pair_stats[idx]);
        });
        for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
            g[static_cast<std::size_t>(pairs[idx].first)][static_cast<std::size_t>(pairs[idx].second)] =
                scores[idx];
            dp.cells += pair_stats[idx].cells;
        }
        std::vector<std::string> ids;
        for (const auto& s : sequences) ids.push_back(s.id);
        tree = neighbor_joining(build_distance_matrix(g, nullptr), ids);
    }

    std::vector<ResidueProfile> profiles(tree.nodes.size());
    for (int n = 0; n < static_cast<int>(tree.nodes.size()); ++n)
        if (tree.is_leaf(n)) {
            const int seq = tree.nodes[static_cast<std::size_t>(n)].seq;
            profiles[static_cast<std::size_t>(n)] =
                ResidueProfile::leaf(seq, sequences[static_cast<std::size_t>(seq)].residues);
        }
    for (int n : tree.merge_sequence()) {
        const auto& node = tree.nodes[static_cast<std::size_t>(n)];
        profiles[static_cast<std::size_t>(n)] =
            align_residue_profiles(profiles[static_cast<std::size_t>(node.left)],
                                   profiles[static_cast<std::size_t>(node.right)], matrix, cfg.gaps, &dp);
        profiles[static_cast<std::size_t>(node.left)] = {};
        profiles[static_cast<std::size_t>(node.right)] = {};
    }
    ResidueProfile& root = profiles[static_cast<std::size_t>(tree.root)];

    Msa msa;
    msa.ids.assign(sequences.size(), {});
    msa.rows.assign(sequences.size(), {});
    for (std::size_t r = 0; r < root.members.size(); ++r) {
        msa.ids[static_cast<std::size_t>(root.members[r])] =
            sequences[static_cast<std::size_t>(root.members[r])].id;
        msa.rows[static_cast<std::size_t>(root.members[r])] = std::move(root.rows[r]);
    }
    msa.validate();
    if (stats) stats->residue_nw_cells += dp.cells;
    return msa;
}

// ---- file helpers ----------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << content;
}

inline std::string format_timings(const RunStats& stats) {
    std::ostringstream out;
    char buf[64];
    out << "# stage timings (ms)\n";
    for (const auto& t : stats.timings) {
        std::snprintf(buf, sizeof buf, "%-22s %10.3f\n", t.name.c_str(), t.ms);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%-22s %10.3f\n", "total", stats.total_ms());
    out << buf;
    out << "local_align_cells=" << stats.local_align_cells << '\n';
    out << "segment_nw_cells=" << stats.segment_nw_cells << '\n';
    out << "residue_nw_cells=" << stats.residue_nw_cells << '\n';
    out << "residue_fallback=" << (stats.residue_fallback ? 1 : 0) << '\n';
    for (const auto& d : stats.diagnostics) out << "# " << d << '\n';
    return out.str();
}

inline std::string dump_divergences_tsv(const DivergenceMatrix& d, const std::vector<std::string>& ids) {
    std::ostringstream out;
    char buf[32];
    out << "# seq_i\tseq_j\talpha_ij\n";
    for (int i = 0; i < d.size(); ++i)
        for (int j = i + 1; j < d.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.6f", d.at(i, j));
            out << ids[static_cast<std::size_t>(i)] << '\t' << ids[static_cast<std::size_t>(j)] << '\t'
                << buf << '\n';
        }
    return out.str();
}

inline std::string dump_segpair_scores_tsv(const SegPairScores& scores,
                                           const std::vector<InformativeView>& views) {
    auto seg_id = [&](SegRef r) {
        const auto& v = views[static_cast<std::size_t>(r.seq)];
        const Segment& s = v.segments[static_cast<std::size_t>(r.seg)];
        return v.parent->id + "/" + std::to_string(s.start) + "-" + std::to_string(s.end);
    };
    std::ostringstream out;
    char buf[32];
    out << "# s_id\tt_id\tseg_score_bits\n";
    for (const auto& [key, info] : scores.entries()) {
        std::snprintf(buf, sizeof buf, "%.6f", info.seg_score);
        out << seg_id(key.a) << '\t' << seg_id(key.b) << '\t' << buf << '\n';
    }
    return out.str();
}

} // namespace segmsa
