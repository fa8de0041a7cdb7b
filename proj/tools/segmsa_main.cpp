// segmsa command line driver.
//
// Subcommands expose each pipeline stage (scores, distances, tree), the full
// aligner (align) and the evaluator (eval) so every step can be inspected
// independently. Exit codes: 0 success, 2 input error, 3 internal error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "segmsa/evaluation.hpp"
#include "segmsa/pipeline.hpp"

namespace fs = std::filesystem;
using namespace segmsa;

namespace {

struct CommonArgs {
    std::string fasta_path;
    std::string annotations_path;
    Config cfg;
    std::string pair_scheme = "linear";
    std::string gap_scheme = "max";
    std::string out_format = "fasta";
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("fasta", args.fasta_path, "Input sequences (FASTA)")->required();
    cmd->add_option("annotations", args.annotations_path,
                    "Segment annotations (TSV: seq_id start end type weight)")
        ->required();
    cmd->add_option("--alpha", args.cfg.alpha, "Informative weight threshold")->capture_default_str();
    cmd->add_option("--min-seg-len", args.cfg.min_seg_len, "Minimum informative segment length")
        ->capture_default_str();
    cmd->add_option("--merge-gap", args.cfg.merge_gap,
                    "Merge same-type informative segments separated by fewer residues than this")
        ->capture_default_str();
    cmd->add_option("--pair-scheme", args.pair_scheme, "progressive|linear|quadratic")
        ->capture_default_str();
    cmd->add_option("--gap-scheme", args.gap_scheme, "zero|max")->capture_default_str();
    cmd->add_option("--threshold-curve", args.cfg.threshold_curve_file,
                    "Threshold curve file (lines: d<TAB>c)");
    cmd->add_option("--matrix", args.cfg.matrix_file, "Substitution matrix (NCBI format)");
    cmd->add_option("--gap-open", args.cfg.gaps.open, "Residue gap open cost")->capture_default_str();
    cmd->add_option("--gap-extend", args.cfg.gaps.extend, "Residue gap extend cost")
        ->capture_default_str();
    cmd->add_option("--lambda", args.cfg.bit_params.lambda, "Karlin-Altschul lambda")
        ->capture_default_str();
    cmd->add_option("--ln-k", args.cfg.bit_params.log_k, "Karlin-Altschul ln K")
        ->capture_default_str();
    cmd->add_option("--threads", args.cfg.threads, "Worker threads for pairwise stages")
        ->capture_default_str();
    cmd->add_option("--seed", args.cfg.seed, "Reserved; the pipeline is deterministic");
}

void finalize_config(CommonArgs& args) {
    if (args.pair_scheme == "progressive") args.cfg.pair_scheme = PairScheme::Progressive;
    else if (args.pair_scheme == "linear") args.cfg.pair_scheme = PairScheme::LinearConsistency;
    else if (args.pair_scheme == "quadratic") args.cfg.pair_scheme = PairScheme::QuadraticConsistency;
    else throw InputError("unknown --pair-scheme '" + args.pair_scheme + "'");
    if (args.gap_scheme == "zero") args.cfg.gap_scheme = GapScheme::ZeroGap;
    else if (args.gap_scheme == "max") args.cfg.gap_scheme = GapScheme::MaxGap;
    else throw InputError("unknown --gap-scheme '" + args.gap_scheme + "'");
    if (args.out_format == "fasta") args.cfg.out_format = OutputFormat::Fasta;
    else if (args.out_format == "clustal") args.cfg.out_format = OutputFormat::Clustal;
    else throw InputError("unknown --out format '" + args.out_format + "'");
    if (args.cfg.threads < 1) throw InputError("--threads must be at least 1");
}

std::vector<AnnotatedSequence> load_inputs(const CommonArgs& args) {
    auto seqs = parse_fasta(read_text_file(args.fasta_path));
    parse_segment_annotations(read_text_file(args.annotations_path), seqs);
    return seqs;
}

int cmd_align(CommonArgs& args, const std::string& out_prefix, const std::string& dump_dir) {
    finalize_config(args);
    AlignResult result = run_align(load_inputs(args), args.cfg);

    std::vector<std::string> ids;
    for (const auto& s : result.sequences) ids.push_back(s.id);

    const std::string msa_path =
        out_prefix + (args.cfg.out_format == OutputFormat::Fasta ? ".fasta" : ".aln");
    write_text_file(msa_path, args.cfg.out_format == OutputFormat::Fasta
                                  ? write_msa_fasta(result.msa)
                                  : write_msa_clustal(result.msa));
    write_text_file(out_prefix + ".nwk", to_newick(result.tree));
    write_text_file(out_prefix + ".dist", write_phylip(result.distances, ids));
    write_text_file(out_prefix + ".timings.txt", format_timings(result.stats));

    if (!dump_dir.empty()) {
        fs::create_directories(dump_dir);
        const std::string d = dump_dir + "/";
        write_text_file(d + "segpair_scores.tsv", dump_segpair_scores_tsv(result.scores, result.views));
        write_text_file(d + "score_table.tsv", dump_score_table_tsv(result.table, result.views));
        write_text_file(d + "divergences.tsv", dump_divergences_tsv(result.divergences, ids));
        write_text_file(d + "distances.phylip", write_phylip(result.distances, ids));
        write_text_file(d + "tree.nwk", to_newick(result.tree));
    }

    for (const auto& diag : result.stats.diagnostics) std::cerr << "warning: " << diag << '\n';
    std::cerr << "wrote " << msa_path << " (" << result.msa.members() << " sequences, "
              << result.msa.columns() << " columns)\n";
    return 0;
}

int cmd_stage(CommonArgs& args, const std::string& stage, const std::string& out_path) {
    finalize_config(args);
    AlignResult result = run_align(load_inputs(args), args.cfg);
    std::vector<std::string> ids;
    for (const auto& s : result.sequences) ids.push_back(s.id);

    std::string text;
    if (stage == "scores") text = dump_score_table_tsv(result.table, result.views);
    else if (stage == "distances") text = write_phylip(result.distances, ids);
    else text = to_newick(result.tree);

    if (out_path.empty()) std::cout << text;
    else write_text_file(out_path, text);
    for (const auto& diag : result.stats.diagnostics) std::cerr << "warning: " << diag << '\n';
    return 0;
}

int cmd_eval(const std::string& test_path, const std::string& ref_path, const std::string& flags_path,
             const std::string& matrix_file, double sp_gap) {
    Msa test = read_msa_fasta(read_text_file(test_path));
    ReferenceAlignment ref;
    ref.msa = read_msa_fasta(read_text_file(ref_path));

    bool flags_defaulted = false;
    if (!flags_path.empty() && fs::exists(flags_path)) {
        ref.flagged = parse_flagged_columns(read_text_file(flags_path));
    } else {
        if (!flags_path.empty())
            std::cerr << "warning: flags file '" << flags_path << "' not found, flagging all columns\n";
        flags_defaulted = true;
        for (std::size_t c = 0; c < ref.msa.columns(); ++c) ref.flagged.push_back(c);
    }

    Config cfg;
    cfg.matrix_file = matrix_file;
    std::unique_ptr<SubstitutionMatrix> holder;
    const SubstitutionMatrix& matrix = resolve_matrix(cfg, holder);

    const ColumnCorrelationResult cc = column_correlation(test, ref);
    const double sp = sp_score(test, matrix, sp_gap);
    std::cout << format_eval_report(cc, sp, flags_defaulted);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"segmsa: template-based segment multiple sequence aligner"};
    app.require_subcommand(1);

    CommonArgs align_args, scores_args, dist_args, tree_args;
    std::string out_prefix = "aligned", dump_dir, stage_out;

    CLI::App* align = app.add_subcommand("align", "Run the full alignment pipeline");
    add_common_options(align, align_args);
    align->add_option("-o,--out-prefix", out_prefix,
                      "Prefix for .fasta/.aln, .nwk, .dist and .timings.txt outputs")
        ->capture_default_str();
    align->add_option("--out", align_args.out_format, "MSA output format: fasta|clustal")
        ->capture_default_str();
    align->add_option("--dump", dump_dir, "Directory for intermediate artifacts");

    CLI::App* scores = app.add_subcommand("scores", "Dump the segment SCORE table (TSV)");
    add_common_options(scores, scores_args);
    scores->add_option("-o,--output", stage_out, "Output file (default stdout)");

    CLI::App* distances = app.add_subcommand("distances", "Dump the segment distance matrix (PHYLIP square)");
    add_common_options(distances, dist_args);
    distances->add_option("-o,--output", stage_out, "Output file (default stdout)");

    CLI::App* tree = app.add_subcommand("tree", "Dump the NJ guide tree (Newick)");
    add_common_options(tree, tree_args);
    tree->add_option("-o,--output", stage_out, "Output file (default stdout)");

    std::string eval_test, eval_ref, eval_flags, eval_matrix;
    double eval_sp_gap = 4.0;
    CLI::App* eval = app.add_subcommand("eval", "Score a test MSA against a reference");
    eval->add_option("test", eval_test, "Test MSA (aligned FASTA)")->required();
    eval->add_option("reference", eval_ref, "Reference MSA (aligned FASTA)")->required();
    eval->add_option("--flags", eval_flags, "Flagged-columns file (one 0-based index per line)");
    eval->add_option("--matrix", eval_matrix, "Substitution matrix for the SP score");
    eval->add_option("--sp-gap", eval_sp_gap, "Residue/gap penalty for the SP score")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (align->parsed()) return cmd_align(align_args, out_prefix, dump_dir);
        if (scores->parsed()) return cmd_stage(scores_args, "scores", stage_out);
        if (distances->parsed()) return cmd_stage(dist_args, "distances", stage_out);
        if (tree->parsed()) return cmd_stage(tree_args, "tree", stage_out);
        if (eval->parsed()) return cmd_eval(eval_test, eval_ref, eval_flags, eval_matrix, eval_sp_gap);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
