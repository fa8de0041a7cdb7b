#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "segmsa/alphabet.hpp"
#include "segmsa/annotated_sequence.hpp"
#include "segmsa/errors.hpp"

namespace segmsa {

// Rectangular grid of residues and gaps; the final artifact output.
struct Msa {
    std::vector<std::string> ids;
    std::vector<std::string> rows;

    std::size_t members() const { return ids.size(); }
    std::size_t columns() const { return rows.empty() ? 0 : rows.front().size(); }

    // Rectangularity and no-all-gap-column checks; violations are bugs.
    void validate() const {
        if (ids.size() != rows.size()) throw InternalError("msa: ids/rows size mismatch");
        for (const auto& r : rows)
            if (r.size() != columns()) throw InternalError("msa: ragged rows");
        for (std::size_t c = 0; c < columns(); ++c) {
            bool any = false;
            for (const auto& r : rows)
                if (r[c] != kGapChar) {
                    any = true;
                    break;
                }
            if (!any) throw InternalError("msa: all-gap column at " + std::to_string(c));
        }
    }
};

inline std::string degap(std::string_view row) {
    std::string out;
    for (char c : row)
        if (c != kGapChar) out.push_back(c);
    return out;
}

inline std::string write_msa_fasta(const Msa& msa, int width = 60) {
    std::string out;
    for (std::size_t m = 0; m < msa.members(); ++m) {
        out += '>';
        out += msa.ids[m];
        out += '\n';
        const std::string& row = msa.rows[m];
        for (std::size_t i = 0; i < row.size(); i += static_cast<std::size_t>(width)) {
            out += row.substr(i, static_cast<std::size_t>(width));
            out += '\n';
        }
        if (row.empty()) out += '\n';
    }
    return out;
}

inline std::string write_msa_clustal(const Msa& msa, int width = 60) {
    std::string out = "CLUSTAL multiple sequence alignment (segmsa)\n\n";
    std::size_t name_w = 0;
    for (const auto& id : msa.ids) name_w = std::max(name_w, id.size());
    name_w = std::max<std::size_t>(name_w + 2, 12);
    for (std::size_t start = 0; start < msa.columns() || start == 0; start += static_cast<std::size_t>(width)) {
        for (std::size_t m = 0; m < msa.members(); ++m) {
            std::string name = msa.ids[m];
            name.resize(name_w, ' ');
            out += name;
            out += msa.rows[m].substr(start, static_cast<std::size_t>(width));
            out += '\n';
        }
        out += '\n';
        if (msa.columns() == 0) break;
    }
    return out;
}

// Reads an aligned FASTA file: '-' allowed, rows must be equal length.
inline Msa read_msa_fasta(std::string_view text) {
    Msa msa;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') {
            std::istringstream hs(line.substr(1));
            std::string id;
            hs >> id;
            if (id.empty()) throw InputError("aligned fasta: empty id");
            for (const auto& existing : msa.ids)
                if (existing == id) throw InputError("aligned fasta: duplicate id '" + id + "'");
            msa.ids.push_back(id);
            msa.rows.emplace_back();
            continue;
        }
        if (msa.rows.empty()) throw InputError("aligned fasta: data before first header");
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            if (c == kGapChar || c == '.') {
                msa.rows.back().push_back(kGapChar);
                continue;
            }
            const char r = normalize_residue(c);
            if (r == '\0')
                throw InputError(std::string("aligned fasta: illegal character '") + c + "'");
            msa.rows.back().push_back(r);
        }
    }
    if (msa.rows.empty()) throw InputError("aligned fasta: no records");
    for (const auto& r : msa.rows)
        if (r.size() != msa.rows.front().size())
            throw InputError("aligned fasta: rows have unequal lengths");
    return msa;
}

} // namespace segmsa
