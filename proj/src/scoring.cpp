#include "cstar/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "cstar/error.hpp"
#include "cstar/seqio.hpp"

namespace cstar {

const std::string_view kBlosum62Text = R"(#  Matrix made by matblas from blosum62.iij
#  * column uses minimum score
#  BLOSUM Clustered Scoring Matrix in 1/2 Bit Units
#  Blocks Database = /data/blocks_5.0/blocks.dat
#  Cluster Percentage: >= 62
#  Entropy =   0.6979, Expected =  -0.5209
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

ScoreScheme::ScoreScheme(int32_t gap_open, int32_t gap_extend) : gap_open_(gap_open), gap_extend_(gap_extend) {
    if (gap_open < 1 || gap_extend < 0) {
        throw Error(ErrorKind::InvalidScheme, "gap penalties must satisfy gap_open >= 1 and gap_extend >= 0");
    }
    // Splitting one gap into two must never be cheaper, otherwise the
    // three-lane recurrence and the per-run definition of W_k disagree.
    if (gap_extend > gap_open) {
        throw Error(ErrorKind::InvalidScheme, "gap_extend must not exceed gap_open");
    }
}

void ScoreScheme::finalize() {
    max_abs_ = 0;
    for (int32_t v : table_) max_abs_ = std::max(max_abs_, std::abs(v));
}

ScoreScheme ScoreScheme::nucleotide(int32_t match, int32_t mismatch, int32_t gap_open, int32_t gap_extend) {
    ScoreScheme s(gap_open, gap_extend);
    s.table_.fill(mismatch);
    for (char c : std::string_view("ACGTU")) {
        for (char d : std::string_view("ACGTU")) {
            // T and U are the same base across DNA/RNA
            bool same = c == d || (c == 'T' && d == 'U') || (c == 'U' && d == 'T');
            s.table_[index(c) * kSize + index(d)] = same ? match : mismatch;
        }
    }
    s.finalize();
    return s;
}

ScoreScheme ScoreScheme::from_matrix_text(std::string_view text, int32_t gap_open, int32_t gap_extend) {
    ScoreScheme s(gap_open, gap_extend);
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<char> columns;
    std::vector<std::pair<std::pair<char, char>, int32_t>> cells;
    int32_t lowest = 0;
    bool have_any = false;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        if (columns.empty()) {
            std::string tok;
            while (fields >> tok) {
                if (tok.size() != 1) throw Error(ErrorKind::InvalidScheme, "bad matrix header token '" + tok + "'");
                columns.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0]))));
            }
            continue;
        }
        std::string label;
        fields >> label;
        if (label.size() != 1) throw Error(ErrorKind::InvalidScheme, "bad matrix row label '" + label + "'");
        char row = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
        for (char col : columns) {
            int32_t v = 0;
            if (!(fields >> v)) {
                throw Error(ErrorKind::InvalidScheme, std::string("matrix row '") + row + "' is short");
            }
            cells.push_back({{row, col}, v});
            lowest = have_any ? std::min(lowest, v) : v;
            have_any = true;
        }
    }
    if (!have_any) throw Error(ErrorKind::InvalidScheme, "matrix text has no entries");

    s.table_.fill(lowest);
    for (const auto& [rc, v] : cells) {
        if (rc.first == 'X' || rc.second == 'X') continue;
        s.table_[index(rc.first) * kSize + index(rc.second)] = v;
    }
    s.finalize();
    return s;
}

ScoreScheme ScoreScheme::from_matrix_file(const std::string& path, int32_t gap_open, int32_t gap_extend) {
    return from_matrix_text(read_input(path), gap_open, gap_extend);
}

ScoreScheme ScoreScheme::blosum62(int32_t gap_open, int32_t gap_extend) {
    static const ScoreScheme base = from_matrix_text(kBlosum62Text, 11, 1);
    ScoreScheme s = base;
    ScoreScheme check(gap_open, gap_extend);  // validates the penalties
    s.gap_open_ = check.gap_open_;
    s.gap_extend_ = check.gap_extend_;
    return s;
}

}  // namespace cstar
