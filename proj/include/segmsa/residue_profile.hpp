#pragma once

#include <limits>
#include <string>
#include <vector>

#include "segmsa/alphabet.hpp"
#include "segmsa/errors.hpp"
#include "segmsa/pairwise.hpp"

namespace segmsa {

// A set of gapped residue rows of equal width, one per member sequence.
// Leaves are single ungapped rows; merges keep the invariant that no column
// is all gaps.
struct ResidueProfile {
    std::vector<int> members;
    std::vector<std::string> rows;

    std::size_t width() const { return rows.empty() ? 0 : rows.front().size(); }

    static ResidueProfile leaf(int member, std::string row) {
        return ResidueProfile{{member}, {std::move(row)}};
    }
};

/*
 * Global profile-profile alignment with affine gaps (Gotoh). Column pairs
 * score the mean substitution score over cross pairs of members (gap entries
 * contribute 0, denominator |P|*|Q|), so two singleton profiles reduce to
 * the plain pairwise global aligner. Gap open/extend are flat.
 *
 * Tie order: match, then a gap in P's rows, then a gap in Q's rows; the
 * all-tie layout is canonical (P's columns first, then Q's).
 */
inline ResidueProfile align_residue_profiles(const ResidueProfile& P, const ResidueProfile& Q,
                                             const SubstitutionMatrix& matrix,
                                             const GapPenalties& gaps, DpStats* stats = nullptr) {
    const int m = static_cast<int>(P.width());
    const int n = static_cast<int>(Q.width());
    if (stats)
        stats->cells += static_cast<std::uint64_t>(m + 1) * static_cast<std::uint64_t>(n + 1);

    ResidueProfile out;
    out.members = P.members;
    out.members.insert(out.members.end(), Q.members.begin(), Q.members.end());
    out.rows.assign(out.members.size(), {});

    auto emit_p = [&](int col) {
        for (std::size_t r = 0; r < P.rows.size(); ++r)
            out.rows[r].push_back(P.rows[r][static_cast<std::size_t>(col)]);
        for (std::size_t r = 0; r < Q.rows.size(); ++r)
            out.rows[P.rows.size() + r].push_back(kGapChar);
    };
    auto emit_q = [&](int col) {
        for (std::size_t r = 0; r < P.rows.size(); ++r) out.rows[r].push_back(kGapChar);
        for (std::size_t r = 0; r < Q.rows.size(); ++r)
            out.rows[P.rows.size() + r].push_back(Q.rows[r][static_cast<std::size_t>(col)]);
    };
    auto emit_both = [&](int pc, int qc) {
        for (std::size_t r = 0; r < P.rows.size(); ++r)
            out.rows[r].push_back(P.rows[r][static_cast<std::size_t>(pc)]);
        for (std::size_t r = 0; r < Q.rows.size(); ++r)
            out.rows[P.rows.size() + r].push_back(Q.rows[r][static_cast<std::size_t>(qc)]);
    };

    if (m == 0 || n == 0) {
        for (int i = 0; i < m; ++i) emit_p(i);
        for (int j = 0; j < n; ++j) emit_q(j);
        return out;
    }

    const double denom = static_cast<double>(P.rows.size()) * static_cast<double>(Q.rows.size());
    auto col_score = [&](int pc, int qc) {
        double s = 0.0;
        for (const auto& pr : P.rows) {
            const char a = pr[static_cast<std::size_t>(pc)];
            if (a == kGapChar) continue;
            for (const auto& qr : Q.rows) {
                const char b = qr[static_cast<std::size_t>(qc)];
                if (b == kGapChar) continue;
                s += matrix.score(a, b);
            }
        }
        return s / denom;
    };

    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const double open_ext = gaps.open + gaps.extend;
    const double ext = gaps.extend;
    const std::size_t w = static_cast<std::size_t>(n) + 1;
    const std::size_t cells = static_cast<std::size_t>(m + 1) * w;
    std::vector<double> M(cells, kNegInf);
    std::vector<double> X(cells, kNegInf); // gap in Q's rows, consumes P
    std::vector<double> Y(cells, kNegInf); // gap in P's rows, consumes Q
    std::vector<char> tbM(cells, 0), tbX(cells, 0), tbY(cells, 0);

    M[0] = 0.0;
    for (int j = 1; j <= n; ++j) {
        const std::size_t c = static_cast<std::size_t>(j);
        Y[c] = -(gaps.open + ext * j);
        tbY[c] = j == 1 ? 'M' : 'Y';
    }
    for (int i = 1; i <= m; ++i) {
        const std::size_t c = static_cast<std::size_t>(i) * w;
        X[c] = -(gaps.open + ext * i);
        tbX[c] = i == 1 ? 'M' : 'X';
    }

    auto pick = [](double vm, double vy, double vx, double& best) {
        // priority M > Y > X on ties
        best = vm;
        char s = 'M';
        if (vy > best) {
            best = vy;
            s = 'Y';
        }
        if (vx > best) {
            best = vx;
            s = 'X';
        }
        return s;
    };

    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= n; ++j) {
            const std::size_t c = static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j);
            const std::size_t up = c - w, left = c - 1, diag = c - w - 1;
            double best;
            tbM[c] = pick(M[diag], Y[diag], X[diag], best);
            M[c] = best + col_score(i - 1, j - 1);
            tbY[c] = pick(M[left] - open_ext, Y[left] - ext, X[left] - open_ext, best);
            Y[c] = best;
            tbX[c] = pick(M[up] - open_ext, Y[up] - open_ext, X[up] - ext, best);
            X[c] = best;
        }
    }

    std::vector<std::pair<int, int>> rev;
    int i = m, j = n;
    const std::size_t end = static_cast<std::size_t>(m) * w + static_cast<std::size_t>(n);
    double best_final;
    char state = pick(M[end], Y[end], X[end], best_final);
    while (i > 0 || j > 0) {
        const std::size_t c = static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j);
        if (state == 'M') {
            rev.emplace_back(i - 1, j - 1);
            state = tbM[c];
            --i;
            --j;
        } else if (state == 'Y') {
            rev.emplace_back(-1, j - 1);
            state = tbY[c];
            --j;
        } else {
            rev.emplace_back(i - 1, -1);
            state = tbX[c];
            --i;
        }
    }
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
        if (it->first >= 0 && it->second >= 0) emit_both(it->first, it->second);
        else if (it->first >= 0) emit_p(it->first);
        else emit_q(it->second);
    }
    return out;
}

} // namespace segmsa
