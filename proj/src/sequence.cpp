#include "cstar/sequence.hpp"

#include <algorithm>

#include "cstar/error.hpp"

namespace cstar {

namespace {

constexpr std::string_view kDnaCore = "ACGTN";
constexpr std::string_view kRnaCore = "ACGUN";
constexpr std::string_view kNucleotideAmbiguity = "RYKMSWBDHV";
constexpr std::string_view kProteinCore = "ACDEFGHIKLMNPQRSTVWYX";
constexpr std::string_view kProteinAmbiguity = "BZJUO";

bool contains(std::string_view set, char c) noexcept {
    return set.find(c) != std::string_view::npos;
}

}  // namespace

std::string_view to_string(AlphabetKind kind) noexcept {
    switch (kind) {
        case AlphabetKind::Dna: return "dna";
        case AlphabetKind::Rna: return "rna";
        case AlphabetKind::Protein: return "protein";
    }
    return "unknown";
}

bool Alphabet::accepts(char c) const noexcept {
    switch (kind) {
        case AlphabetKind::Dna:
            return contains(kDnaCore, c) || (allows_ambiguity && contains(kNucleotideAmbiguity, c));
        case AlphabetKind::Rna:
            return contains(kRnaCore, c) || (allows_ambiguity && contains(kNucleotideAmbiguity, c));
        case AlphabetKind::Protein:
            return contains(kProteinCore, c) || (allows_ambiguity && contains(kProteinAmbiguity, c));
    }
    return false;
}

void validate_msa(const Msa& msa, bool forbid_gap_columns) {
    if (msa.rows.empty()) throw Error(ErrorKind::EmptyDataset, "alignment has no rows");
    for (const auto& r : msa.rows) {
        if (r.row.size() != msa.n_cols) {
            throw Error(ErrorKind::LengthMismatch,
                        "row '" + r.id + "' has " + std::to_string(r.row.size()) + " columns, expected " +
                            std::to_string(msa.n_cols));
        }
    }
    if (!forbid_gap_columns) return;
    for (std::size_t c = 0; c < msa.n_cols; ++c) {
        bool all_gap = std::all_of(msa.rows.begin(), msa.rows.end(),
                                   [c](const MsaRow& r) { return r.row[c] == kGap; });
        if (all_gap) throw Error(ErrorKind::LengthMismatch, "column " + std::to_string(c) + " is all gaps");
    }
}

std::string strip_gaps(std::string_view row) {
    std::string out;
    out.reserve(row.size());
    for (char c : row) {
        if (c != kGap) out.push_back(c);
    }
    return out;
}

}  // namespace cstar
