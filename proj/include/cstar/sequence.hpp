#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cstar {

enum class AlphabetKind { Dna, Rna, Protein };

std::string_view to_string(AlphabetKind kind) noexcept;

struct Alphabet {
    AlphabetKind kind = AlphabetKind::Dna;
    // IUPAC ambiguity codes beyond N/X are accepted (and score as mismatches)
    bool allows_ambiguity = false;

    bool is_nucleotide() const noexcept { return kind != AlphabetKind::Protein; }
    /// `c` must already be uppercase.
    bool accepts(char c) const noexcept;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

inline constexpr char kGap = '-';

struct Sequence {
    std::string id;
    std::string residues;
    std::size_t index = 0;
    AlphabetKind kind = AlphabetKind::Dna;

    std::size_t size() const noexcept { return residues.size(); }
    friend bool operator==(const Sequence&, const Sequence&) = default;
};

struct MsaRow {
    std::string id;
    std::string row;
    friend bool operator==(const MsaRow&, const MsaRow&) = default;
};

/// Column-aligned rows, kept in input order.
struct Msa {
    std::vector<MsaRow> rows;
    std::size_t n_cols = 0;
    AlphabetKind kind = AlphabetKind::Dna;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }
    friend bool operator==(const Msa&, const Msa&) = default;
};

/// Throws LengthMismatch for ragged rows and EmptyDataset for no rows.
/// All-gap columns are rejected only when `forbid_gap_columns` is set.
void validate_msa(const Msa& msa, bool forbid_gap_columns = false);

std::string strip_gaps(std::string_view row);

}  // namespace cstar
