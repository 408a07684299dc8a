#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "cstar/engine.hpp"
#include "cstar/phylo.hpp"
#include "cstar/sequence.hpp"

namespace cstar {

/// Column penalty between two rows: 2 when exactly one is a gap, 1 for
/// differing residues, 0 otherwise.
uint64_t sp_pair(std::string_view row_a, std::string_view row_b);

struct SpReport {
    uint64_t total_sp = 0;
    double avg_sp = 0.0;
    uint64_t n_pairs = 0;

    /// avg_sp rounded half-up to one decimal from the exact ratio.
    std::string avg_text() const;
};

SpReport sp_report(const Msa& msa, const RunConfig& run = {});

struct TreeScore {
    double log_likelihood = 0.0;  // natural log, JC69
};

/// Felsenstein pruning under JC69. Gaps, N and ambiguity codes are missing
/// data at the tips.
TreeScore jc69_loglik(const Msa& msa, const PhyloTree& tree);

}  // namespace cstar
