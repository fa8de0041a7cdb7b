#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "segmsa/errors.hpp"
#include "segmsa/msa.hpp"
#include "segmsa/substitution_matrix.hpp"

namespace segmsa {

// A reference MSA plus the column indices that carry conserved features.
struct ReferenceAlignment {
    Msa msa;
    std::vector<std::size_t> flagged;

    void validate() const {
        msa.validate();
        for (std::size_t c : flagged)
            if (c >= msa.columns())
                throw InputError("reference alignment: flagged column " + std::to_string(c) +
                                 " out of bounds");
    }
};

// Flagged-columns file: one 0-based index per line, '#' comments.
inline std::vector<std::size_t> parse_flagged_columns(std::string_view text) {
    std::vector<std::size_t> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        long v;
        if (!(ls >> v) || v < 0)
            throw InputError("flagged columns line " + std::to_string(lineno) +
                             ": expected a non-negative index");
        out.push_back(static_cast<std::size_t>(v));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Sum-of-pairs score: matrix score for residue pairs, -gap_penalty for
// residue/gap, 0 for gap/gap, over all columns and unordered row pairs.
inline double sp_score(const Msa& msa, const SubstitutionMatrix& matrix, double gap_penalty) {
    double total = 0.0;
    for (std::size_t c = 0; c < msa.columns(); ++c) {
        for (std::size_t a = 0; a < msa.members(); ++a) {
            for (std::size_t b = a + 1; b < msa.members(); ++b) {
                const char ra = msa.rows[a][c];
                const char rb = msa.rows[b][c];
                if (ra != kGapChar && rb != kGapChar) total += matrix.score(ra, rb);
                else if (ra != kGapChar || rb != kGapChar) total -= gap_penalty;
            }
        }
    }
    return total;
}

struct ColumnCorrelationResult {
    std::size_t flagged_columns = 0;
    std::size_t recovered_columns = 0;
    std::size_t recovered_pairs = 0;
    std::size_t total_pairs = 0;

    // Strict total-column recovery over flagged columns; empty when no
    // columns are flagged.
    std::optional<double> total_column_pct;
    // Per-pair (SP-style) variant reported alongside for information.
    std::optional<double> pair_pct;
};

/*
 * Percentage of flagged reference columns whose exact (member, residue
 * index) set reappears as one column of the test MSA. Both alignments must
 * cover the same members and degap to the same sequences.
 */
inline ColumnCorrelationResult column_correlation(const Msa& test, const ReferenceAlignment& ref) {
    ref.validate();
    test.validate();
    if (test.members() != ref.msa.members())
        throw InputError("column correlation: member sets differ");

    std::map<std::string, std::size_t> test_row;
    for (std::size_t m = 0; m < test.members(); ++m) test_row[test.ids[m]] = m;

    std::vector<std::size_t> ref_to_test(ref.msa.members());
    for (std::size_t m = 0; m < ref.msa.members(); ++m) {
        auto it = test_row.find(ref.msa.ids[m]);
        if (it == test_row.end())
            throw InputError("column correlation: member '" + ref.msa.ids[m] + "' missing from test MSA");
        ref_to_test[m] = it->second;
        if (degap(ref.msa.rows[m]) != degap(test.rows[it->second]))
            throw InputError("column correlation: member '" + ref.msa.ids[m] +
                             "' degaps differently in test and reference");
    }

    // test: column of the r-th residue of member m, and residue count per column
    std::vector<std::vector<std::size_t>> col_of(test.members());
    std::vector<int> col_residues(test.columns(), 0);
    for (std::size_t m = 0; m < test.members(); ++m) {
        for (std::size_t c = 0; c < test.columns(); ++c)
            if (test.rows[m][c] != kGapChar) {
                col_of[m].push_back(c);
                ++col_residues[c];
            }
    }

    // per ref column and member: residue index, or -1 for a gap
    std::vector<std::vector<long>> ref_ridx(ref.msa.members(),
                                            std::vector<long>(ref.msa.columns(), -1));
    for (std::size_t m = 0; m < ref.msa.members(); ++m) {
        long r = 0;
        for (std::size_t c = 0; c < ref.msa.columns(); ++c)
            if (ref.msa.rows[m][c] != kGapChar) ref_ridx[m][c] = r++;
    }

    ColumnCorrelationResult result;
    result.flagged_columns = ref.flagged.size();

    for (std::size_t c : ref.flagged) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs; // (test member, residue idx)
        for (std::size_t m = 0; m < ref.msa.members(); ++m)
            if (ref_ridx[m][c] >= 0)
                pairs.emplace_back(ref_to_test[m], static_cast<std::size_t>(ref_ridx[m][c]));
        if (pairs.empty()) continue;

        bool same_col = true;
        const std::size_t c0 = col_of[pairs.front().first][pairs.front().second];
        for (const auto& [m, r] : pairs)
            if (col_of[m][r] != c0) {
                same_col = false;
                break;
            }
        // recovered: the exact pair set appears together as one test column
        // with nothing else in it
        if (same_col && static_cast<int>(pairs.size()) == col_residues[c0])
            ++result.recovered_columns;

        // pairwise variant: unordered member pairs sharing a test column
        for (std::size_t a = 0; a < pairs.size(); ++a)
            for (std::size_t b = a + 1; b < pairs.size(); ++b) {
                ++result.total_pairs;
                if (col_of[pairs[a].first][pairs[a].second] ==
                    col_of[pairs[b].first][pairs[b].second])
                    ++result.recovered_pairs;
            }
    }

    if (result.flagged_columns > 0)
        result.total_column_pct =
            100.0 * static_cast<double>(result.recovered_columns) /
            static_cast<double>(result.flagged_columns);
    if (result.total_pairs > 0)
        result.pair_pct = 100.0 * static_cast<double>(result.recovered_pairs) /
                          static_cast<double>(result.total_pairs);
    return result;
}

// key=value report, readable by both humans and scripts.
inline std::string format_eval_report(const ColumnCorrelationResult& cc, double sp,
                                      bool flags_defaulted) {
    std::ostringstream out;
    char buf[64];
    out << "flagged_columns=" << cc.flagged_columns << '\n';
    out << "recovered_columns=" << cc.recovered_columns << '\n';
    if (cc.total_column_pct) {
        std::snprintf(buf, sizeof buf, "%.4f", *cc.total_column_pct);
        out << "column_correlation=" << buf << '\n';
    } else {
        out << "column_correlation=N/A\n";
    }
    if (cc.pair_pct) {
        std::snprintf(buf, sizeof buf, "%.4f", *cc.pair_pct);
        out << "column_correlation_pairwise=" << buf << '\n';
    } else {
        out << "column_correlation_pairwise=N/A\n";
    }
    std::snprintf(buf, sizeof buf, "%.4f", sp);
    out << "sp_score=" << buf << '\n';
    if (flags_defaulted) out << "warning=no flags file given, all columns treated as flagged\n";
    return out.str();
}

} // namespace segmsa
