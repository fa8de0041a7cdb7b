#pragma once

#include <array>
#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "segmsa/alphabet.hpp"
#include "segmsa/errors.hpp"

namespace segmsa {

// BLOSUM62 in NCBI matrix text format. User-supplied matrices in the same
// format are accepted via SubstitutionMatrix::parse_ncbi.
inline constexpr const char* kBlosum62Text = R"(#  Matrix made by matblas from blosum62.iij
#  BLOSUM Clustered Scoring Matrix in 1/2 Bit Units
#  Blocks Database = /data/blocks_5.0/blocks.dat
#  Cluster Percentage: >= 62
   A  R  N  D  C  Q  E  G  H  I  L  K  M  F  P  S  T  W  Y  V  B  Z  X  *
A  4 -1 -2 -2  0 -1 -1  0 -2 -1 -1 -1 -1 -2 -1  1  0 -3 -2  0 -2 -1  0 -4
R -1  5  0 -2 -3  1  0 -2  0 -3 -2  2 -1 -3 -2 -1 -1 -3 -2 -3 -1  0 -1 -4
N -2  0  6  1 -3  0  0  0  1 -3 -3  0 -2 -3 -2  1  0 -4 -2 -3  3  0 -1 -4
D -2 -2  1  6 -3  0  2 -1 -1 -3 -4 -1 -3 -3 -1  0 -1 -4 -3 -3  4  1 -1 -4
C  0 -3 -3 -3  9 -3 -4 -3 -3 -1 -1 -3 -1 -2 -3 -1 -1 -2 -2 -1 -3 -3 -2 -4
Q -1  1  0  0 -3  5  2 -2  0 -3 -2  1  0 -3 -1  0 -1 -2 -1 -2  0  3 -1 -4
E -1  0  0  2 -4  2  5 -2  0 -3 -3  1 -2 -3 -1  0 -1 -3 -2 -2  1  4 -1 -4
G  0 -2  0 -1 -3 -2 -2  6 -2 -4 -4 -2 -3 -3 -2  0 -2 -2 -3 -3 -1 -2 -1 -4
H -2  0  1 -1 -3  0  0 -2  8 -3 -3 -1 -2 -1 -2 -1 -2 -2  2 -3  0  0 -1 -4
I -1 -3 -3 -3 -1 -3 -3 -4 -3  4  2 -3  1  0 -3 -2 -1 -3 -1  3 -3 -3 -1 -4
L -1 -2 -3 -4 -1 -2 -3 -4 -3  2  4 -2  2  0 -3 -2 -1 -2 -1  1 -4 -3 -1 -4
K -1  2  0 -1 -3  1  1 -2 -1 -3 -2  5 -1 -3 -1  0 -1 -3 -2 -2  0  1 -1 -4
M -1 -1 -2 -3 -1  0 -2 -3 -2  1  2 -1  5  0 -2 -1 -1 -1 -1  1 -3 -1 -1 -4
F -2 -3 -3 -3 -2 -3 -3 -3 -1  0  0 -3  0  6 -4 -2 -2  1  3 -1 -3 -3 -1 -4
P -1 -2 -2 -1 -3 -1 -1 -2 -2 -3 -3 -1 -2 -4  7 -1 -1 -4 -3 -2 -2 -1 -2 -4
S  1 -1  1  0 -1  0  0  0 -1 -2 -2  0 -1 -2 -1  4  1 -3 -2 -2  0  0  0 -4
T  0 -1  0 -1 -1 -1 -1 -2 -2 -1 -1 -1 -1 -2 -1  1  5 -2 -2  0 -1 -1  0 -4
W -3 -3 -4 -4 -2 -2 -3 -2 -2 -3 -2 -3 -1  1 -4 -3 -2 11  2 -3 -4 -3 -2 -4
Y -2 -2 -2 -3 -2 -1 -2 -3  2 -1 -1 -2 -1  3 -3 -2 -2  2  7 -1 -3 -2 -1 -4
V  0 -3 -3 -3 -1 -2 -2 -3 -3  3  1 -2  1 -1 -2 -2  0 -3 -1  4 -3 -2 -1 -4
B -2 -1  3  4 -3  0  1 -1  0 -3 -4  0 -3 -3 -2  0 -1 -4 -3 -3  4  1 -1 -4
Z -1  0  0  1 -3  3  4 -2  0 -3 -3  1 -1 -3 -1  0 -1 -3 -2 -2  1  4 -1 -4
X  0 -1 -1 -1 -2 -1 -1 -1 -1 -1 -1 -1 -1 -1 -2  0  0 -2 -1 -1 -1 -1 -1 -4
* -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4 -4  1
)";

// Integer substitution score table indexed by residue letters.
class SubstitutionMatrix {
public:
    SubstitutionMatrix() = default;

    static SubstitutionMatrix parse_ncbi(std::string_view text, std::string name) {
        SubstitutionMatrix m;
        m.name_ = std::move(name);
        m.index_.fill(-1);

        std::istringstream in{std::string(text)};
        std::string line;
        bool have_header = false;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream ls(line);
            if (!have_header) {
                std::string tok;
                while (ls >> tok) {
                    if (tok.size() != 1)
                        throw InputError("matrix header: expected single-letter columns, got '" + tok + "'");
                    m.letters_.push_back(tok[0]);
                }
                if (m.letters_.empty()) throw InputError("matrix header: no columns");
                for (std::size_t i = 0; i < m.letters_.size(); ++i) {
                    unsigned char c = static_cast<unsigned char>(m.letters_[i]);
                    if (m.index_[c] != -1) throw InputError("matrix header: duplicate column letter");
                    m.index_[c] = static_cast<int>(i);
                }
                m.table_.assign(m.letters_.size() * m.letters_.size(), 0);
                have_header = true;
                continue;
            }
            std::string label;
            ls >> label;
            if (label.size() != 1 || row >= m.letters_.size() || label[0] != m.letters_[row])
                throw InputError("matrix rows must repeat the header letters in order");
            for (std::size_t col = 0; col < m.letters_.size(); ++col) {
                int v;
                if (!(ls >> v)) throw InputError("matrix row '" + label + "': too few values");
                m.table_[row * m.letters_.size() + col] = v;
            }
            int extra;
            if (ls >> extra) throw InputError("matrix row '" + label + "': too many values");
            ++row;
        }
        if (!have_header) throw InputError("matrix: empty input");
        if (row != m.letters_.size()) throw InputError("matrix: missing rows");
        if (!m.symmetric()) throw InputError("matrix '" + m.name_ + "' is not symmetric");
        return m;
    }

    static const SubstitutionMatrix& blosum62() {
        static const SubstitutionMatrix m = parse_ncbi(kBlosum62Text, "BLOSUM62");
        return m;
    }

    int score(char a, char b) const {
        const int ia = index_[static_cast<unsigned char>(a)];
        const int ib = index_[static_cast<unsigned char>(b)];
        if (ia < 0 || ib < 0)
            throw InputError(std::string("matrix '") + name_ + "' has no entry for '" + a + "'/'" + b + "'");
        return table_[static_cast<std::size_t>(ia) * letters_.size() + static_cast<std::size_t>(ib)];
    }

    bool covers(char a) const { return index_[static_cast<unsigned char>(a)] >= 0; }

    bool symmetric() const {
        const std::size_t n = letters_.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (table_[i * n + j] != table_[j * n + i]) return false;
        return true;
    }

    // Diagonal dominance check over the 20 canonical residues: each residue
    // must prefer itself to any other canonical residue. Holds for BLOSUM62;
    // ambiguity codes (B, Z, X, *) are excluded on purpose.
    bool diagonal_dominant() const {
        for (char a : kCanonicalResidues) {
            if (!covers(a)) return false;
            const int self = score(a, a);
            for (char b : kCanonicalResidues)
                if (b != a && score(a, b) >= self) return false;
        }
        return true;
    }

    const std::string& name() const { return name_; }
    const std::vector<char>& letters() const { return letters_; }

private:
    std::string name_;
    std::vector<char> letters_;
    std::array<int, 256> index_{};
    std::vector<int> table_;
};

} // namespace segmsa
