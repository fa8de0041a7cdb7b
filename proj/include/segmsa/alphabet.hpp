#pragma once

#include <array>
#include <cctype>
#include <string_view>

namespace segmsa {

// Residue alphabet: the 20 standard amino acids plus X (unknown).
// Gap characters are not residues; they exist only inside alignments.
inline constexpr std::string_view kResidueAlphabet = "ARNDCQEGHILKMFPSTWYVX";
inline constexpr std::string_view kCanonicalResidues = "ARNDCQEGHILKMFPSTWYV";
inline constexpr char kGapChar = '-';

namespace detail {
inline constexpr std::array<bool, 256> make_residue_table() {
    std::array<bool, 256> t{};
    for (char c : kResidueAlphabet) t[static_cast<unsigned char>(c)] = true;
    return t;
}
inline constexpr std::array<bool, 256> kIsResidue = make_residue_table();
} // namespace detail

inline bool is_residue(char c) {
    return detail::kIsResidue[static_cast<unsigned char>(c)];
}

// Uppercases c and returns it if it is a valid residue code, otherwise '\0'.
inline char normalize_residue(char c) {
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return is_residue(u) ? u : '\0';
}

} // namespace segmsa
