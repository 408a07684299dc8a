#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cstar/scoring.hpp"
#include "cstar/sequence.hpp"

namespace cstar {

/// Full local-alignment score matrices. `h` is the H of the recurrence;
/// `up` and `left` are the affine gap lanes needed for traceback. Row 0 and
/// column 0 of `h` are zero.
struct DpMatrix {
    std::size_t rows = 0;  // n + 1
    std::size_t cols = 0;  // m + 1
    std::vector<int32_t> h;
    std::vector<int32_t> up;    // best score ending in a gap in b (consumes a_i)
    std::vector<int32_t> left;  // best score ending in a gap in a (consumes b_j)
    std::size_t best_i = 0;
    std::size_t best_j = 0;

    int32_t at(std::size_t i, std::size_t j) const { return h[i * cols + j]; }
    int32_t best_score() const { return at(best_i, best_j); }
};

enum class AlignMode { Local, Global };

/// Half-open residue range.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const Span&, const Span&) = default;
};

struct PairAlignment {
    std::string aligned_a;
    std::string aligned_b;
    int64_t score = 0;
    Span span_a;
    Span span_b;
    AlignMode mode = AlignMode::Global;
    uint64_t cells = 0;  // DP cells filled to produce this alignment
};

/// Throws SequenceTooLong if a score over these lengths could leave the
/// 32-bit range.
void check_score_range(std::size_t n, std::size_t m, const ScoreScheme& scheme);

DpMatrix sw_fill(std::string_view a, std::string_view b, const ScoreScheme& scheme);
DpMatrix sw_fill(const Sequence& a, const Sequence& b, const ScoreScheme& scheme);

/// Walks back from the best cell until the first zero cell, preferring
/// diagonal, then up (gap in b), then left (gap in a). Within a gap lane the
/// gap is closed as soon as closing attains the cell value.
PairAlignment sw_traceback(const DpMatrix& m, std::string_view a, std::string_view b, const ScoreScheme& scheme);
PairAlignment sw_traceback(const DpMatrix& m, const Sequence& a, const Sequence& b, const ScoreScheme& scheme);

/// Best local score in linear memory.
int32_t sw_score(std::string_view a, std::string_view b, const ScoreScheme& scheme);

/// Optimal end-to-end alignment with affine gaps, traced back from (n, m)
/// under the same tie order as sw_traceback. Either segment may be empty.
PairAlignment global_align(std::string_view a, std::string_view b, const ScoreScheme& scheme);
PairAlignment global_align(const Sequence& a, const Sequence& b, const ScoreScheme& scheme);

/// Score of a given gapped pair under the scheme (gap runs charged W_k).
int64_t score_alignment(std::string_view row_a, std::string_view row_b, const ScoreScheme& scheme);

}  // namespace cstar
