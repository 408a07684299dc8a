#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cstar/anchor.hpp"
#include "cstar/engine.hpp"
#include "cstar/pairwise.hpp"
#include "cstar/scoring.hpp"
#include "cstar/sequence.hpp"

namespace cstar {

enum class CenterMode { First, Sampled };

struct MsaConfig {
    CenterMode center_mode = CenterMode::First;
    std::size_t kmer = kDefaultKmer;
    RunConfig run;
};

/// Column-run encoding of a pairwise alignment against the center:
/// 'M' both residues, 'I' query residue against a center gap, 'D' center
/// residue against a query gap.
struct EditOp {
    char op = 'M';
    uint32_t len = 0;
    friend bool operator==(const EditOp&, const EditOp&) = default;
};
using EditScript = std::vector<EditOp>;

EditScript to_edit_script(const PairAlignment& pair);
/// Center-side gap runs of one pairwise alignment as (center offset, run).
/// Offset = number of center residues preceding the run.
std::vector<std::pair<uint32_t, uint32_t>> center_gap_runs(const EditScript& script);

/// Inserted-space record for a whole run: the per-offset maximum of every
/// pair's center-side gap runs plus each sequence's own script.
struct GapLedger {
    std::vector<uint32_t> center_gaps;  // size center_len + 1
    std::vector<EditScript> per_seq;    // indexed by input position

    explicit GapLedger(std::size_t center_len = 0, std::size_t n_seqs = 0)
        : center_gaps(center_len + 1, 0), per_seq(n_seqs) {}

    void add(std::size_t seq_index, EditScript script);
    std::size_t total_columns() const noexcept;
    std::vector<std::pair<uint32_t, uint32_t>> per_seq_gaps(std::size_t seq_index) const {
        return center_gap_runs(per_seq.at(seq_index));
    }
};

/// Row of the final alignment for one sequence: its script laid out on the
/// merged center, extra gaps appended after its own insertions.
std::string render_row(const EditScript& script, std::string_view query, std::span<const uint32_t> center_gaps);
std::string render_center_row(std::string_view center, std::span<const uint32_t> center_gaps);

/// First: index 0. Sampled: ceil(sqrt(n)) stride-sampled candidates, each
/// scored against a second stride sample (offset half a stride) by shared
/// k-mer hits (nucleotides) or summed local-alignment scores (protein);
/// highest score wins, ties to the smaller index.
std::size_t select_center(std::span<const Sequence> seqs, CenterMode mode, std::size_t kmer = kDefaultKmer,
                          const ScoreScheme* scheme = nullptr, const RunConfig& run = {});

/// The two stride samples used by Sampled mode.
std::vector<std::size_t> center_candidates(std::size_t n);
std::vector<std::size_t> center_probes(std::size_t n, std::size_t candidate);

/// End-to-end alignment of `query` against `center`. Nucleotides go through
/// the trie: chained anchors are copied verbatim and only the gaps between
/// them are aligned by dynamic programming. Proteins, queries shorter than
/// k and queries with no anchors are aligned globally in one piece.
PairAlignment align_to_center(const Sequence& center, const Sequence& query, const ScoreScheme& scheme,
                              const KmerTrie* trie);
PairAlignment align_to_center(const Sequence& center, const Sequence& query, const ScoreScheme& scheme,
                              const MsaConfig& cfg);

/// Moves every gap run as far left as it can go without changing the
/// aligned residues' pairing score.
void left_align_gaps(PairAlignment& pair);

struct CenterPair {
    std::size_t index = 0;
    std::string id;
    PairAlignment alignment;  // row a = center, row b = query
};

Msa merge_alignments(const Sequence& center, std::span<const CenterPair> pairs);

Msa run_msa(std::span<const Sequence> seqs, const ScoreScheme& scheme, const MsaConfig& cfg,
            RunReport* report = nullptr);

}  // namespace cstar
