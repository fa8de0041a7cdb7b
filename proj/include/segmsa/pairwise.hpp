#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "segmsa/alphabet.hpp"
#include "segmsa/errors.hpp"
#include "segmsa/substitution_matrix.hpp"

namespace segmsa {

// Affine gap model: a gap of length L costs open + extend * L (BLAST
// convention), expressed as positive costs subtracted by the DP.
struct GapPenalties {
    int open = 11;
    int extend = 1;

    long run_cost(long len) const { return len > 0 ? open + static_cast<long>(extend) * len : 0; }
};

// Karlin-Altschul bit-score conversion parameters (ungapped BLOSUM62 defaults).
struct BitScoreParams {
    double lambda = 0.3176;
    double log_k = -2.0099154889; // ln 0.134
};

// bits(S) = (lambda * S - ln K) / ln 2, floored at 0 so scores stay
// comparable as non-negative similarities.
inline double bits(long raw_score, const BitScoreParams& p = {}) {
    if (p.lambda <= 0) throw InputError("bit score: lambda must be positive");
    const double b = (p.lambda * static_cast<double>(raw_score) - p.log_k) / std::log(2.0);
    return b > 0 ? b : 0.0;
}

// DP work counter, used for the performance accounting of the pipeline.
struct DpStats {
    std::uint64_t cells = 0;
};

// A pairwise local alignment. aligned_pairs holds (x index | -1, y index | -1)
// columns; coordinates are half-open over the input strings.
struct LocalAlignment {
    int x_start = 0, x_end = 0;
    int y_start = 0, y_end = 0;
    std::vector<std::pair<int, int>> aligned_pairs;
    long raw_score = 0;
    double bit_score = 0.0;

    bool empty() const { return aligned_pairs.empty(); }
    std::size_t columns() const { return aligned_pairs.size(); }
};

// Two equal-length gapped rows; degapping each recovers the inputs.
struct ResidueAlignment {
    std::string x_row;
    std::string y_row;

    std::size_t columns() const { return x_row.size(); }
};

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline long score_columns(const std::vector<std::pair<int, int>>& cols, std::string_view x,
                          std::string_view y, const SubstitutionMatrix& m, const GapPenalties& g) {
    long score = 0;
    long x_gap_run = 0, y_gap_run = 0;
    auto flush = [&](long& run) {
        score -= g.run_cost(run);
        run = 0;
    };
    for (const auto& [xi, yi] : cols) {
        if (xi >= 0 && yi >= 0) {
            flush(x_gap_run);
            flush(y_gap_run);
            score += m.score(x[static_cast<std::size_t>(xi)], y[static_cast<std::size_t>(yi)]);
        } else if (xi >= 0) {
            flush(x_gap_run);
            ++y_gap_run; // x residue over a gap in y's row
        } else {
            flush(y_gap_run);
            ++x_gap_run;
        }
    }
    flush(x_gap_run);
    flush(y_gap_run);
    return score;
}

} // namespace detail

// Rescoring of an alignment's columns; used to enforce the invariant that a
// returned raw_score matches its own column list.
inline long rescore_local(const LocalAlignment& a, std::string_view x, std::string_view y,
                          const SubstitutionMatrix& m, const GapPenalties& g) {
    return detail::score_columns(a.aligned_pairs, x, y, m, g);
}

inline long rescore_global(const ResidueAlignment& a, const SubstitutionMatrix& m,
                           const GapPenalties& g) {
    std::vector<std::pair<int, int>> cols;
    int xi = 0, yi = 0;
    for (std::size_t c = 0; c < a.columns(); ++c) {
        const bool xr = a.x_row[c] != kGapChar;
        const bool yr = a.y_row[c] != kGapChar;
        cols.emplace_back(xr ? xi++ : -1, yr ? yi++ : -1);
    }
    std::string dx = a.x_row, dy = a.y_row;
    dx.erase(std::remove(dx.begin(), dx.end(), kGapChar), dx.end());
    dy.erase(std::remove(dy.begin(), dy.end(), kGapChar), dy.end());
    return detail::score_columns(cols, dx, dy, m, g);
}

// Optimal Smith-Waterman local alignment under affine gaps. Deterministic:
// the best cell is the first maximum in row-major order and traceback ties
// prefer match, then a gap in x's row, then a gap in y's row.
inline LocalAlignment local_align(std::string_view x, std::string_view y,
                                  const SubstitutionMatrix& matrix, const GapPenalties& gaps,
                                  const BitScoreParams& bit_params = {}, DpStats* stats = nullptr) {
    const int m = static_cast<int>(x.size());
    const int n = static_cast<int>(y.size());
    LocalAlignment out;
    if (stats) stats->cells += static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n);
    if (m == 0 || n == 0) {
        out.bit_score = bits(0, bit_params);
        return out;
    }

    const double open_ext = gaps.open + gaps.extend;
    const double ext = gaps.extend;
    const std::size_t w = static_cast<std::size_t>(n) + 1;
    std::vector<double> H(static_cast<std::size_t>(m + 1) * w, 0.0);
    std::vector<double> E(static_cast<std::size_t>(m + 1) * w, detail::kNegInf); // gap in x's row
    std::vector<double> F(static_cast<std::size_t>(m + 1) * w, detail::kNegInf); // gap in y's row

    double best = 0.0;
    int bi = 0, bj = 0;
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= n; ++j) {
            const std::size_t c = static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j);
            const std::size_t up = c - w, left = c - 1, diag = c - w - 1;
            E[c] = std::max(H[left] - open_ext, E[left] - ext);
            F[c] = std::max(H[up] - open_ext, F[up] - ext);
            const double d = H[diag] + matrix.score(x[static_cast<std::size_t>(i - 1)],
                                                    y[static_cast<std::size_t>(j - 1)]);
            H[c] = std::max({0.0, d, E[c], F[c]});
            if (H[c] > best) {
                best = H[c];
                bi = i;
                bj = j;
            }
        }
    }

    if (best <= 0.0) {
        out.bit_score = bits(0, bit_params);
        return out;
    }

    // Traceback from the best cell until the score path hits zero. Ties
    // prefer match, then a gap in x's row, then a gap in y's row; gap runs
    // close as early as possible.
    std::vector<std::pair<int, int>> rev;
    int i = bi, j = bj;
    char state = 'H';
    while (i > 0 || j > 0) {
        const std::size_t c = static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j);
        if (state == 'H') {
            if (H[c] == 0.0) break;
            const double d = (i > 0 && j > 0)
                                 ? H[c - w - 1] + matrix.score(x[static_cast<std::size_t>(i - 1)],
                                                               y[static_cast<std::size_t>(j - 1)])
                                 : detail::kNegInf;
            if (i > 0 && j > 0 && H[c] == d) {
                rev.emplace_back(i - 1, j - 1);
                --i;
                --j;
            } else if (j > 0 && H[c] == E[c]) {
                state = 'E';
            } else {
                state = 'F';
            }
        } else if (state == 'E') {
            rev.emplace_back(-1, j - 1);
            const bool close_gap = (E[c] == H[c - 1] - open_ext);
            --j;
            if (close_gap) state = 'H';
        } else {
            rev.emplace_back(i - 1, -1);
            const bool close_gap = (F[c] == H[c - w] - open_ext);
            --i;
            if (close_gap) state = 'H';
        }
    }
    std::reverse(rev.begin(), rev.end());

    out.aligned_pairs = std::move(rev);
    int min_x = m, max_x = 0, min_y = n, max_y = 0;
    for (const auto& [xi, yi] : out.aligned_pairs) {
        if (xi >= 0) {
            min_x = std::min(min_x, xi);
            max_x = std::max(max_x, xi + 1);
        }
        if (yi >= 0) {
            min_y = std::min(min_y, yi);
            max_y = std::max(max_y, yi + 1);
        }
    }
    out.x_start = min_x;
    out.x_end = max_x;
    out.y_start = min_y;
    out.y_end = max_y;
    out.raw_score = static_cast<long>(best + 0.5);
    out.bit_score = bits(out.raw_score, bit_params);
    return out;
}

// Pluggable local-alignment heuristic H. The default is full Smith-Waterman;
// a seeded or banded aligner can be slotted in behind the same interface.
class LocalAligner {
public:
    virtual ~LocalAligner() = default;
    virtual LocalAlignment align(std::string_view x, std::string_view y) const = 0;
};

class SmithWatermanAligner final : public LocalAligner {
public:
    SmithWatermanAligner(const SubstitutionMatrix& matrix, GapPenalties gaps,
                         BitScoreParams bit_params = {})
        : matrix_(&matrix), gaps_(gaps), bit_params_(bit_params) {}

    LocalAlignment align(std::string_view x, std::string_view y) const override {
        return local_align(x, y, *matrix_, gaps_, bit_params_);
    }

    const SubstitutionMatrix& matrix() const { return *matrix_; }
    const GapPenalties& gaps() const { return gaps_; }
    const BitScoreParams& bit_params() const { return bit_params_; }

private:
    const SubstitutionMatrix* matrix_;
    GapPenalties gaps_;
    BitScoreParams bit_params_;
};

namespace detail {

/*
 * Myers-Miller linear-space global alignment (maximisation form).
 *
 * The split recursion carries tb/te: the gap-open cost charged to a deletion
 * (x against gaps) that touches the top/bottom boundary of the sub-problem,
 * so a gap crossing the split line pays its open cost exactly once.
 */
struct MmWork {
    std::string_view x, y;
    const SubstitutionMatrix* m;
    double open, ext;
    std::vector<std::pair<int, int>> cols;
    DpStats* stats;

    double gap_cost(int len) const { return len > 0 ? open + ext * len : 0.0; }

    void emit_x(int xs, int count) {
        for (int i = 0; i < count; ++i) cols.emplace_back(xs + i, -1);
    }
    void emit_y(int ys, int count) {
        for (int j = 0; j < count; ++j) cols.emplace_back(-1, ys + j);
    }

    // Forward (or reversed) pass filling CC (best) and DD (best ending in an
    // open x-deletion) over y prefixes, for x[xs,xe) against y[ys,ye).
    void pass(int xs, int xe, int ys, int ye, double tb, bool reversed, std::vector<double>& CC,
              std::vector<double>& DD) {
        const int mm = xe - xs, nn = ye - ys;
        if (stats) stats->cells += static_cast<std::uint64_t>(mm) * static_cast<std::uint64_t>(nn);
        CC.assign(static_cast<std::size_t>(nn) + 1, 0.0);
        DD.assign(static_cast<std::size_t>(nn) + 1, 0.0);
        for (int j = 1; j <= nn; ++j) {
            CC[static_cast<std::size_t>(j)] = -gap_cost(j);
            DD[static_cast<std::size_t>(j)] = CC[static_cast<std::size_t>(j)] - open;
        }
        double t = -tb;
        for (int i = 1; i <= mm; ++i) {
            double s = CC[0];
            t -= ext;
            double c = t;
            CC[0] = c;
            double e = t - open;
            const char xc = reversed ? x[static_cast<std::size_t>(xe - i)]
                                     : x[static_cast<std::size_t>(xs + i - 1)];
            for (int j = 1; j <= nn; ++j) {
                const std::size_t ju = static_cast<std::size_t>(j);
                const char yc = reversed ? y[static_cast<std::size_t>(ye - j)]
                                         : y[static_cast<std::size_t>(ys + j - 1)];
                e = std::max(c - open, e) - ext;
                const double d = std::max(CC[ju] - open, DD[ju]) - ext;
                c = std::max({s + m->score(xc, yc), e, d});
                s = CC[ju];
                CC[ju] = c;
                DD[ju] = d;
            }
        }
        DD[0] = CC[0]; // a pure-deletion prefix ends in an open deletion
    }

    void align(int xs, int xe, int ys, int ye, double tb, double te) {
        const int mm = xe - xs, nn = ye - ys;
        if (mm == 0) {
            emit_y(ys, nn);
            return;
        }
        if (nn == 0) {
            emit_x(xs, mm);
            return;
        }
        if (mm == 1) {
            // Single x residue: either deleted (cheapest boundary open), or
            // matched against one y position between two insertions.
            const double del = -(std::min(tb, te) + ext) - gap_cost(nn);
            double best = detail::kNegInf;
            int best_j = -1;
            for (int j = 0; j < nn; ++j) {
                const double v = -gap_cost(j) +
                                 m->score(x[static_cast<std::size_t>(xs)],
                                          y[static_cast<std::size_t>(ys + j)]) -
                                 gap_cost(nn - 1 - j);
                if (v > best) {
                    best = v;
                    best_j = j;
                }
            }
            if (del > best) {
                emit_x(xs, 1);
                emit_y(ys, nn);
            } else {
                emit_y(ys, best_j);
                cols.emplace_back(xs, ys + best_j);
                emit_y(ys + best_j + 1, nn - 1 - best_j);
            }
            return;
        }

        const int xmid = xs + mm / 2;
        std::vector<double> CC, DD, RR, SS;
        pass(xs, xmid, ys, ye, tb, false, CC, DD);
        pass(xmid, xe, ys, ye, te, true, RR, SS);

        double best = detail::kNegInf;
        int best_j = 0;
        bool through_gap = false;
        for (int j = 0; j <= nn; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            const std::size_t jr = static_cast<std::size_t>(nn - j);
            const double t1 = CC[ju] + RR[jr];
            if (t1 > best) {
                best = t1;
                best_j = j;
                through_gap = false;
            }
            const double t2 = DD[ju] + SS[jr] + open; // merged gap: one open refunded
            if (t2 > best) {
                best = t2;
                best_j = j;
                through_gap = true;
            }
        }

        if (!through_gap) {
            align(xs, xmid, ys, ys + best_j, tb, open);
            align(xmid, xe, ys + best_j, ye, open, te);
        } else {
            align(xs, xmid - 1, ys, ys + best_j, tb, 0.0);
            emit_x(xmid - 1, 2); // the two residues straddling the split share one gap
            align(xmid + 1, xe, ys + best_j, ye, 0.0, te);
        }
    }
};

} // namespace detail

// Score-only global affine alignment (rolling-array Gotoh); used where the
// alignment itself is not needed.
inline double global_score_only(std::string_view x, std::string_view y,
                                const SubstitutionMatrix& matrix, const GapPenalties& gaps,
                                DpStats* stats = nullptr) {
    const int m = static_cast<int>(x.size());
    const int n = static_cast<int>(y.size());
    if (stats)
        stats->cells += static_cast<std::uint64_t>(m + 1) * static_cast<std::uint64_t>(n + 1);
    if (m == 0 || n == 0) return -static_cast<double>(gaps.run_cost(m + n));

    const double open_ext = gaps.open + gaps.extend;
    const double ext = gaps.extend;
    const std::size_t w = static_cast<std::size_t>(n) + 1;
    std::vector<double> M(w), X(w), Y(w);
    M[0] = 0.0;
    X[0] = Y[0] = detail::kNegInf;
    for (int j = 1; j <= n; ++j) {
        M[static_cast<std::size_t>(j)] = detail::kNegInf;
        Y[static_cast<std::size_t>(j)] = -(gaps.open + ext * j);
        X[static_cast<std::size_t>(j)] = detail::kNegInf;
    }
    for (int i = 1; i <= m; ++i) {
        double diag_m = M[0], diag_x = X[0], diag_y = Y[0];
        M[0] = detail::kNegInf;
        X[0] = -(gaps.open + ext * i);
        Y[0] = detail::kNegInf;
        for (int j = 1; j <= n; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            const double prev_m = M[ju], prev_x = X[ju], prev_y = Y[ju];
            const double best_diag = std::max({diag_m, diag_x, diag_y});
            M[ju] = best_diag + matrix.score(x[static_cast<std::size_t>(i - 1)],
                                             y[static_cast<std::size_t>(j - 1)]);
            X[ju] = std::max({prev_m - open_ext, prev_x - ext, prev_y - open_ext});
            Y[ju] = std::max({M[ju - 1] - open_ext, Y[ju - 1] - ext, X[ju - 1] - open_ext});
            diag_m = prev_m;
            diag_x = prev_x;
            diag_y = prev_y;
        }
    }
    return std::max({M[static_cast<std::size_t>(n)], X[static_cast<std::size_t>(n)],
                     Y[static_cast<std::size_t>(n)]});
}

// Optimal Needleman-Wunsch global alignment with affine gaps in linear space
// (Myers-Miller). Either input may be empty.
inline ResidueAlignment global_align_residues(std::string_view x, std::string_view y,
                                              const SubstitutionMatrix& matrix,
                                              const GapPenalties& gaps, DpStats* stats = nullptr) {
    detail::MmWork w{x, y, &matrix, static_cast<double>(gaps.open),
                     static_cast<double>(gaps.extend), {}, stats};
    w.align(0, static_cast<int>(x.size()), 0, static_cast<int>(y.size()),
            static_cast<double>(gaps.open), static_cast<double>(gaps.open));

    ResidueAlignment out;
    out.x_row.reserve(w.cols.size());
    out.y_row.reserve(w.cols.size());
    for (const auto& [xi, yi] : w.cols) {
        out.x_row.push_back(xi >= 0 ? x[static_cast<std::size_t>(xi)] : kGapChar);
        out.y_row.push_back(yi >= 0 ? y[static_cast<std::size_t>(yi)] : kGapChar);
    }
    return out;
}

} // namespace segmsa
