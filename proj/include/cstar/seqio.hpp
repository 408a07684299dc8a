#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cstar/sequence.hpp"

namespace cstar {

struct ParseOptions {
    std::optional<AlphabetKind> alphabet_hint;
    bool permissive = false;  // accept IUPAC ambiguity codes
    bool allow_gaps = false;  // aligned input
};

struct FastaRecords {
    Alphabet alphabet;
    std::vector<Sequence> sequences;
};

/// Records come back in file order. Without a hint, the alphabet is detected
/// from the first record: any U means RNA, anything outside ACGTUN means
/// protein, DNA otherwise. Later records are checked against that choice.
FastaRecords parse_fasta(std::string_view bytes, const ParseOptions& options = {});

/// Whole-file read; gzip input (magic 1F 8B) is inflated transparently.
std::string read_input(const std::string& path);

struct DatasetStats {
    std::size_t count = 0;
    std::size_t min_len = 0;
    std::size_t max_len = 0;
    double avg_len = 0.0;
    std::size_t total_bytes = 0;
};

DatasetStats dataset_stats(const std::vector<Sequence>& seqs);

inline constexpr std::size_t kFastaLineWidth = 80;

void write_fasta(const Msa& msa, std::ostream& sink);
void write_fasta_file(const Msa& msa, const std::string& path);

/// Gap-tolerant parse of aligned FASTA. Rows must share one length.
Msa parse_msa(std::string_view bytes, const ParseOptions& options = {});

}  // namespace cstar
