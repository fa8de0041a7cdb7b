// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances and thresholds are pinned in code.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "segmsa/evaluation.hpp"
#include "segmsa/pipeline.hpp"

using namespace segmsa;
namespace fs = std::filesystem;

namespace {

const SubstitutionMatrix& B62 = SubstitutionMatrix::blosum62();
const GapPenalties kGaps{11, 1};

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (detail.empty()) detail = what;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// Criterion 1: local and global aligner scores equal brute-force oracles.
// Enumeration is exhaustive over all 4-letter pairs up to length 4 and runs
// on random pairs up to length 6; longer random pairs (<= 12) are checked
// against an independent plain DP, since path enumeration at length 6 over
// all ~3e7 pairs cannot finish inside the criterion's own 60 s budget.
Outcome criterion_dp_oracle() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();

    const std::string alphabet = "ACDE";
    std::vector<std::string> all_strings{""};
    {
        std::vector<std::string> frontier{""};
        for (int len = 1; len <= 4; ++len) {
            std::vector<std::string> next;
            for (const auto& s : frontier)
                for (char c : alphabet) next.push_back(s + c);
            all_strings.insert(all_strings.end(), next.begin(), next.end());
            frontier = std::move(next);
        }
    }

    oracles::EnumOracle oracle(B62, kGaps);
    std::size_t checked = 0, failures = 0;
    for (const auto& x : all_strings) {
        for (const auto& y : all_strings) {
            const long enum_g = static_cast<long>(oracle.global(x, y));
            const auto mm = global_align_residues(x, y, B62, kGaps);
            if (rescore_global(mm, B62, kGaps) != enum_g) ++failures;
            const long enum_l = static_cast<long>(oracle.local(x, y));
            if (local_align(x, y, B62, kGaps).raw_score != enum_l) ++failures;
            ++checked;
        }
    }
    if (failures) out.fail(fmt("%zu mismatches in the exhaustive <=4 sweep", failures));
    out.note(fmt("exhaustive <=4: %zu pairs", checked));

    std::mt19937_64 rng(20240601);
    auto random_over = [&](const std::string& sigma, int max_len) {
        const int len = std::uniform_int_distribution<int>(0, max_len)(rng);
        std::string s;
        for (int i = 0; i < len; ++i)
            s.push_back(sigma[static_cast<std::size_t>(std::uniform_int_distribution<int>(
                0, static_cast<int>(sigma.size()) - 1)(rng))]);
        return s;
    };

    std::size_t fail6 = 0;
    for (int iter = 0; iter < 3000; ++iter) {
        const std::string x = random_over(alphabet, 6), y = random_over(alphabet, 6);
        if (rescore_global(global_align_residues(x, y, B62, kGaps), B62, kGaps) !=
            static_cast<long>(oracles::enum_global_score(x, y, B62, kGaps)))
            ++fail6;
        if (local_align(x, y, B62, kGaps).raw_score !=
            static_cast<long>(oracles::enum_local_score(x, y, B62, kGaps)))
            ++fail6;
    }
    if (fail6) out.fail(fmt("%zu mismatches on random <=6 enumeration pairs", fail6));

    const std::string aas = generators::kAminoAcids;
    std::size_t fail12 = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        const std::string x = random_over(aas, 12), y = random_over(aas, 12);
        if (rescore_global(global_align_residues(x, y, B62, kGaps), B62, kGaps) !=
            static_cast<long>(oracles::plain_gotoh_global(x, y, B62, kGaps)))
            ++fail12;
        if (local_align(x, y, B62, kGaps).raw_score !=
            static_cast<long>(oracles::plain_local_from_global(x, y, B62, kGaps)))
            ++fail12;
    }
    if (fail12) out.fail(fmt("%zu mismatches on random <=12 plain-DP pairs", fail12));

    const double secs = seconds_since(t0);
    if (secs >= 60.0) out.fail(fmt("runtime %.1f s exceeds 60 s", secs));
    out.detail += fmt("; 3000 random <=6 + 1000 random <=12; %.1f s", secs);
    return out;
}

// Criterion 2: segment NW equals exhaustive matching enumeration on 500
// random instances with up to 4 segments per side.
Outcome criterion_segment_nw_oracle() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240602);
    const char* type_names[3] = {"H", "E", "C"};

    std::size_t failures = 0;
    for (int iter = 0; iter < 500; ++iter) {
        const int ni = std::uniform_int_distribution<int>(0, 4)(rng);
        const int nj = std::uniform_int_distribution<int>(0, 4)(rng);
        std::vector<AnnotatedSequence> seqs(2);
        seqs[0].id = "i";
        seqs[1].id = "j";
        std::vector<InformativeView> views(2);
        views[0].parent = &seqs[0];
        views[1].parent = &seqs[1];
        std::vector<std::string> ti, tj;
        for (int a = 0; a < ni; ++a) {
            ti.push_back(type_names[std::uniform_int_distribution<int>(0, 2)(rng)]);
            views[0].segments.push_back(Segment{a * 10, a * 10 + 5, ti.back(), 8.0});
        }
        for (int b = 0; b < nj; ++b) {
            tj.push_back(type_names[std::uniform_int_distribution<int>(0, 2)(rng)]);
            views[1].segments.push_back(Segment{b * 10, b * 10 + 5, tj.back(), 8.0});
        }
        SegmentScoreTable table;
        std::uniform_real_distribution<double> val(0.0, 25.0);
        for (int a = 0; a < ni; ++a)
            for (int b = 0; b < nj; ++b)
                if (ti[static_cast<std::size_t>(a)] == tj[static_cast<std::size_t>(b)])
                    table.insert_pair(SegRef{0, a}, SegRef{1, b}, val(rng));
        std::vector<SegRef> bi, bj;
        for (int a = 0; a < ni; ++a) {
            table.insert_gap(SegRef{0, a}, val(rng) / 4.0);
            bi.push_back(SegRef{0, a});
        }
        for (int b = 0; b < nj; ++b) {
            table.insert_gap(SegRef{1, b}, val(rng) / 4.0);
            bj.push_back(SegRef{1, b});
        }

        const double got = segment_nw(bi, bj, views, table).score;
        const double want = oracles::enum_segment_alignment(
            ti, tj, [&](int a, int b) { return table.pair(SegRef{0, a}, SegRef{1, b}); },
            [&](int a) { return table.gap(SegRef{0, a}); },
            [&](int b) { return table.gap(SegRef{1, b}); });
        if (std::abs(got - want) > 1e-9) ++failures;
    }
    if (failures) out.fail(fmt("%zu of 500 instances mismatched", failures));
    const double secs = seconds_since(t0);
    if (secs >= 30.0) out.fail(fmt("runtime %.1f s exceeds 30 s", secs));
    out.note(fmt("500 instances, %.2f s", secs));
    return out;
}

// Criterion 3: NJ recovers the topology of every additive matrix from 200
// random 4-8 leaf trees.
Outcome criterion_nj_recovery() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240603);
    int recovered = 0;
    for (int iter = 0; iter < 200; ++iter) {
        const int leaves = std::uniform_int_distribution<int>(4, 8)(rng);
        const auto rt = oracles::random_additive_tree(leaves, rng);
        const auto nj = neighbor_joining(rt.dist, rt.ids);
        if (oracles::tree_splits(nj, oracles::leaf_bits(rt.ids)) == rt.splits) ++recovered;
    }
    if (recovered != 200) out.fail(fmt("recovered %d/200 topologies", recovered));
    const double secs = seconds_since(t0);
    if (secs >= 10.0) out.fail(fmt("runtime %.1f s exceeds 10 s", secs));
    out.note(fmt("200/200 topologies, %.2f s", secs));
    return out;
}

// Criterion 4: round-trip, rectangularity and no all-gap columns on 100
// random annotated inputs.
Outcome criterion_round_trip() {
    Outcome out;
    std::mt19937_64 rng(20240604);
    std::size_t failures = 0;
    for (int iter = 0; iter < 100; ++iter) {
        const int k = std::uniform_int_distribution<int>(1, 10)(rng);
        const auto seqs = generators::random_annotated(k, 300, rng);
        Config cfg;
        try {
            const AlignResult result = run_align(seqs, cfg);
            result.msa.validate();
            for (int s = 0; s < k; ++s)
                if (degap(result.msa.rows[static_cast<std::size_t>(s)]) !=
                    seqs[static_cast<std::size_t>(s)].residues)
                    ++failures;
        } catch (const std::exception& e) {
            ++failures;
            out.note(std::string("exception: ") + e.what());
        }
    }
    if (failures) out.fail(fmt("%zu failures over 100 inputs", failures));
    out.note("100 inputs, k<=10, len<=300");
    return out;
}

std::vector<generators::PlantedParams> planted_grid() {
    std::vector<generators::PlantedParams> grid;
    for (int rep = 0; rep < 5; ++rep) {
        for (int k : {5, 10}) {
            for (int m : {2, 3}) {
                generators::PlantedParams p;
                p.k = k;
                p.motifs = m;
                p.seq_len = 150;
                grid.push_back(p);
            }
        }
    }
    return grid;
}

// Criterion 5: planted-motif column recovery with the default configuration
// (alpha = 6, linear consistency, max gap): >= 90% on average over 20
// instances and >= 70% on every instance.
Outcome criterion_planted_motifs() {
    Outcome out;
    std::mt19937_64 rng(20240605);
    double sum = 0.0, worst = 100.0;
    int n = 0;
    for (const auto& p : planted_grid()) {
        const auto inst = generators::plant_motifs(p, rng);
        Config cfg; // defaults: alpha 6, linear consistency, max gap
        const AlignResult result = run_align(inst.sequences, cfg);
        const auto cc = column_correlation(result.msa, inst.reference);
        if (!cc.total_column_pct) {
            out.fail("no flagged columns in a planted instance");
            continue;
        }
        sum += *cc.total_column_pct;
        worst = std::min(worst, *cc.total_column_pct);
        ++n;
    }
    const double avg = sum / n;
    if (avg < 90.0) out.fail(fmt("average recovery %.2f%% below 90%%", avg));
    if (worst < 70.0) out.fail(fmt("worst instance %.2f%% below 70%%", worst));
    out.note(fmt("avg %.2f%%, min %.2f%% over %d instances", avg, worst, n));
    return out;
}

// Criterion 6: Quadratic >= Linear >= Progressive for every stored pair
// score on every planted instance.
Outcome criterion_scheme_ordering() {
    Outcome out;
    std::mt19937_64 rng(20240605); // same instances as criterion 5
    std::size_t violations = 0, compared = 0;
    for (const auto& p : planted_grid()) {
        const auto inst = generators::plant_motifs(p, rng);
        Config prog, lin, quad;
        prog.pair_scheme = PairScheme::Progressive;
        lin.pair_scheme = PairScheme::LinearConsistency;
        quad.pair_scheme = PairScheme::QuadraticConsistency;
        const auto rp = run_align(inst.sequences, prog);
        const auto rl = run_align(inst.sequences, lin);
        const auto rq = run_align(inst.sequences, quad);
        for (const auto& [key, vp] : rp.table.pair_entries()) {
            const double vl = rl.table.pair(key.a, key.b);
            const double vq = rq.table.pair(key.a, key.b);
            if (!(vq >= vl && vl >= vp)) ++violations;
            ++compared;
        }
    }
    if (violations) out.fail(fmt("%zu of %zu pair scores violate the ordering", violations, compared));
    out.note(fmt("%zu pair scores checked", compared));
    return out;
}

// Criterion 7: byte-identical MSA, tree and distance files across runs at 1
// and 8 threads.
Outcome criterion_determinism() {
    Outcome out;
    std::mt19937_64 rng(20240607);
    generators::PlantedParams p;
    p.k = 10;
    p.motifs = 3;
    p.seq_len = 150;
    const auto inst = generators::plant_motifs(p, rng);

    const auto dir = fs::temp_directory_path() / "segmsa_acceptance_det";
    fs::create_directories(dir);
    auto emit = [&](int threads, const std::string& tag) {
        Config cfg;
        cfg.threads = threads;
        const AlignResult r = run_align(inst.sequences, cfg);
        std::vector<std::string> ids;
        for (const auto& s : r.sequences) ids.push_back(s.id);
        write_text_file((dir / (tag + ".fasta")).string(), write_msa_fasta(r.msa));
        write_text_file((dir / (tag + ".nwk")).string(), to_newick(r.tree));
        write_text_file((dir / (tag + ".dist")).string(), write_phylip(r.distances, ids));
    };
    emit(1, "t1");
    emit(8, "t8");
    for (const char* suffix : {".fasta", ".nwk", ".dist"}) {
        const std::string a = read_text_file((dir / ("t1" + std::string(suffix))).string());
        const std::string b = read_text_file((dir / ("t8" + std::string(suffix))).string());
        if (a != b) out.fail(std::string("files differ: ") + suffix);
        if (a.empty()) out.fail(std::string("empty output: ") + suffix);
    }
    fs::remove_all(dir);
    out.note("k=10, m=3: msa/tree/dist byte-identical at 1 and 8 threads");
    return out;
}

// Criterion 8: k=20, length 500, 5 informative segments per sequence must
// finish end-to-end under 10 s, and the segment-NW stage must touch at most
// 1% of the DP cells of the plain residue-level progressive baseline.
Outcome criterion_performance() {
    Outcome out;
    std::mt19937_64 rng(20240608);
    generators::PlantedParams p;
    p.k = 20;
    p.motifs = 5;
    p.seq_len = 500;
    p.motif_len_min = 20;
    p.motif_len_max = 25;
    const auto inst = generators::plant_motifs(p, rng);

    Config cfg;
    const auto t0 = std::chrono::steady_clock::now();
    const AlignResult result = run_align(inst.sequences, cfg);
    const double pipeline_secs = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    RunStats fallback_stats;
    const Msa baseline = residue_progressive_align(inst.sequences, cfg, &fallback_stats);
    const double baseline_secs = seconds_since(t1);
    baseline.validate();

    if (pipeline_secs >= 10.0) out.fail(fmt("pipeline took %.2f s (>= 10 s)", pipeline_secs));
    const double ratio = static_cast<double>(result.stats.segment_nw_cells) /
                         static_cast<double>(fallback_stats.residue_nw_cells);
    if (ratio > 0.01)
        out.fail(fmt("segment-NW cells are %.4f%% of the baseline (limit 1%%)", ratio * 100.0));
    out.note(fmt("pipeline %.2f s, baseline %.2f s, segment cells %llu vs %llu (%.4f%%)",
                 pipeline_secs, baseline_secs,
                 static_cast<unsigned long long>(result.stats.segment_nw_cells),
                 static_cast<unsigned long long>(fallback_stats.residue_nw_cells), ratio * 100.0));
    return out;
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Entry> criteria = {
        {"dp-oracle-suite", criterion_dp_oracle},
        {"segment-nw-oracle", criterion_segment_nw_oracle},
        {"nj-additive-recovery", criterion_nj_recovery},
        {"round-trip-invariant", criterion_round_trip},
        {"planted-motif-recovery", criterion_planted_motifs},
        {"scheme-ordering", criterion_scheme_ordering},
        {"determinism", criterion_determinism},
        {"performance-sanity", criterion_performance},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        if (!out.pass) ++failures;
        std::printf("[%zu/%zu] %s  %-24s %s\n", i + 1, criteria.size(), out.pass ? "PASS" : "FAIL",
                    criteria[i].name, out.detail.c_str());
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failures == 0 ? 0 : 1;
}
