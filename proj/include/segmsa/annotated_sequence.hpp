#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "segmsa/alphabet.hpp"
#include "segmsa/errors.hpp"

namespace segmsa {

// A typed, weighted span of a sequence. Coordinates are 0-based, half-open.
struct Segment {
    int start = 0;
    int end = 0;
    std::string seg_type;
    double weight = 0.0;

    int length() const { return end - start; }
};

struct AnnotatedSequence {
    std::string id;
    std::string residues;
    std::vector<Segment> segments; // non-overlapping, sorted by start

    int length() const { return static_cast<int>(residues.size()); }
};

// The informative slice of a sequence: segments surviving the weight/length
// filter, their concatenation, and a map from concatenated coordinates back
// to parent coordinates.
struct InformativeView {
    const AnnotatedSequence* parent = nullptr;
    std::vector<Segment> segments;  // in parent order, post-merge
    std::string concatenated;       // the informative subsequence
    std::vector<int> index_map;     // concatenated pos -> parent pos, strictly increasing
};

inline std::vector<AnnotatedSequence> parse_fasta(std::string_view text) {
    std::vector<AnnotatedSequence> out;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    bool in_record = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') {
            if (in_record && out.back().residues.empty())
                throw InputError("fasta: empty sequence for '" + out.back().id + "'");
            std::string header = line.substr(1);
            std::istringstream hs(header);
            std::string id;
            hs >> id;
            if (id.empty()) throw InputError("fasta: header with empty id");
            if (!seen.insert(id).second) throw InputError("fasta: duplicate id '" + id + "'");
            out.push_back(AnnotatedSequence{id, "", {}});
            in_record = true;
            continue;
        }
        if (!in_record) throw InputError("fasta: sequence data before first header");
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            const char r = normalize_residue(c);
            if (r == '\0')
                throw InputError(std::string("fasta: illegal residue '") + c + "' in '" + out.back().id + "'");
            out.back().residues.push_back(r);
        }
    }
    if (in_record && out.back().residues.empty())
        throw InputError("fasta: empty sequence for '" + out.back().id + "'");
    if (out.empty()) throw InputError("fasta: no records");
    return out;
}

// Normalized writer: 60-column wrapped, uppercase, '\n' line ends.
inline std::string write_fasta(const std::vector<AnnotatedSequence>& seqs, int width = 60) {
    std::string out;
    for (const auto& s : seqs) {
        out += '>';
        out += s.id;
        out += '\n';
        for (int i = 0; i < s.length(); i += width) {
            out.append(s.residues, static_cast<std::size_t>(i),
                       static_cast<std::size_t>(std::min(width, s.length() - i)));
            out += '\n';
        }
    }
    return out;
}

// Attaches segment rows to their sequences. Rows are tab-separated
//   seq_id  start  end  type  weight
// with 0-based half-open coordinates; '#' lines are comments.
inline void parse_segment_annotations(std::string_view text, std::vector<AnnotatedSequence>& seqs) {
    std::map<std::string, AnnotatedSequence*> by_id;
    for (auto& s : seqs) by_id[s.id] = &s;

    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::string id, type;
        long start, end;
        double weight;
        if (!(ls >> id >> start >> end >> type >> weight))
            throw InputError("annotations line " + std::to_string(lineno) + ": expected 'seq_id start end type weight'");
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw InputError("annotations line " + std::to_string(lineno) + ": unknown seq_id '" + id + "'");
        AnnotatedSequence& seq = *it->second;
        if (start < 0 || end <= start || end > seq.length())
            throw InputError("annotations line " + std::to_string(lineno) + ": segment [" +
                             std::to_string(start) + "," + std::to_string(end) + ") out of range for '" +
                             id + "' (length " + std::to_string(seq.length()) + ")");
        if (weight < 0)
            throw InputError("annotations line " + std::to_string(lineno) + ": negative weight");
        seq.segments.push_back(Segment{static_cast<int>(start), static_cast<int>(end), type, weight});
    }
    for (auto& s : seqs) {
        std::sort(s.segments.begin(), s.segments.end(),
                  [](const Segment& a, const Segment& b) { return a.start < b.start; });
        for (std::size_t i = 1; i < s.segments.size(); ++i)
            if (s.segments[i].start < s.segments[i - 1].end)
                throw InputError("annotations: overlapping segments on '" + s.id + "' at " +
                                 std::to_string(s.segments[i].start));
    }
}

// Keeps segments with weight >= alpha and length >= min_len, merges surviving
// same-type segments separated by fewer than merge_gap residues (the merged
// weight is the span-length-weighted mean of the parts), and builds the
// concatenated informative sequence with its index map.
inline InformativeView classify_informative(const AnnotatedSequence& seq, double alpha,
                                            int min_len, int merge_gap) {
    InformativeView view;
    view.parent = &seq;

    std::vector<Segment> kept;
    for (const Segment& s : seq.segments)
        if (s.weight >= alpha && s.length() >= min_len) kept.push_back(s);

    for (const Segment& s : kept) {
        if (!view.segments.empty()) {
            Segment& prev = view.segments.back();
            if (prev.seg_type == s.seg_type && s.start - prev.end < merge_gap) {
                const double la = prev.length(), lb = s.length();
                prev.weight = (prev.weight * la + s.weight * lb) / (la + lb);
                prev.end = s.end; // intervening residues adopt the merged type
                continue;
            }
        }
        view.segments.push_back(s);
    }

    for (const Segment& s : view.segments) {
        for (int p = s.start; p < s.end; ++p) {
            view.concatenated.push_back(seq.residues[static_cast<std::size_t>(p)]);
            view.index_map.push_back(p);
        }
    }
    return view;
}

} // namespace segmsa
