#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "segmsa/errors.hpp"

namespace segmsa {

// Piecewise-linear information threshold c : [0,2] -> bits per residue.
// Maps a pairwise divergence level to the per-residue bit-score bar a
// segment pair must clear to count as neighbors. Must be positive and
// monotone non-decreasing.
class ThresholdCurve {
public:
    // c(d) = clamp(0.5 * d, 0.25, 1.0), expressed as breakpoints.
    static ThresholdCurve default_curve() {
        return ThresholdCurve({{0.0, 0.25}, {0.5, 0.25}, {2.0, 1.0}});
    }

    explicit ThresholdCurve(std::vector<std::pair<double, double>> breakpoints)
        : points_(std::move(breakpoints)) {
        if (points_.empty()) throw InputError("threshold curve: no breakpoints");
        std::sort(points_.begin(), points_.end());
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const auto& [d, c] = points_[i];
            if (d < 0.0 || d > 2.0)
                throw InputError("threshold curve: breakpoint argument outside [0,2]");
            if (c <= 0.0) throw InputError("threshold curve: values must be positive");
            if (i > 0 && d == points_[i - 1].first)
                throw InputError("threshold curve: duplicate breakpoint");
            if (i > 0 && c < points_[i - 1].second)
                throw InputError("threshold curve: must be monotone non-decreasing");
        }
    }

    // Lines "d<TAB>c(d)"; '#' comments allowed. Linear interpolation between
    // breakpoints, clamped to the end values outside their span.
    static ThresholdCurve parse(std::string_view text) {
        std::vector<std::pair<double, double>> pts;
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream ls(line);
            double d, c;
            if (!(ls >> d >> c))
                throw InputError("threshold curve line " + std::to_string(lineno) +
                                 ": expected 'd<TAB>c'");
            pts.emplace_back(d, c);
        }
        return ThresholdCurve(std::move(pts));
    }

    double operator()(double d) const {
        if (d < 0.0 || d > 2.0)
            throw InputError("threshold curve: argument " + std::to_string(d) + " outside [0,2]");
        if (d <= points_.front().first) return points_.front().second;
        if (d >= points_.back().first) return points_.back().second;
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (d <= points_[i].first) {
                const auto& [d0, c0] = points_[i - 1];
                const auto& [d1, c1] = points_[i];
                return c0 + (c1 - c0) * (d - d0) / (d1 - d0);
            }
        }
        return points_.back().second;
    }

    const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

private:
    std::vector<std::pair<double, double>> points_;
};

} // namespace segmsa
