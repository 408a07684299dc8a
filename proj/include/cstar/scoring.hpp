#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace cstar {

/// Substitution function over uppercase ASCII residues plus an affine gap
/// family W_k = gap_open + gap_extend * (k - 1).
class ScoreScheme {
public:
    /// Match/mismatch scheme. N scores as a mismatch against everything,
    /// itself included, as does any non-ACGTU letter.
    static ScoreScheme nucleotide(int32_t match, int32_t mismatch, int32_t gap_open, int32_t gap_extend);
    static ScoreScheme default_nucleotide() { return nucleotide(1, -1, 2, 1); }

    /// NCBI-format matrix text ('#' comments, a header row of letters, then
    /// one labelled row per letter). X and letters missing from the matrix
    /// score as the matrix minimum.
    static ScoreScheme from_matrix_text(std::string_view text, int32_t gap_open, int32_t gap_extend);
    static ScoreScheme from_matrix_file(const std::string& path, int32_t gap_open, int32_t gap_extend);
    static ScoreScheme blosum62(int32_t gap_open = 11, int32_t gap_extend = 1);

    int32_t score(char a, char b) const noexcept {
        return table_[index(a) * kSize + index(b)];
    }
    int32_t gap_open() const noexcept { return gap_open_; }
    int32_t gap_extend() const noexcept { return gap_extend_; }
    /// W_k for k >= 1.
    int64_t gap_cost(int64_t k) const noexcept { return gap_open_ + gap_extend_ * (k - 1); }
    int32_t max_abs_score() const noexcept { return max_abs_; }

private:
    static constexpr std::size_t kSize = 128;
    static std::size_t index(char c) noexcept { return static_cast<unsigned char>(c) & 0x7F; }

    ScoreScheme(int32_t gap_open, int32_t gap_extend);
    void finalize();

    std::array<int32_t, kSize * kSize> table_{};
    int32_t gap_open_ = 0;
    int32_t gap_extend_ = 0;
    int32_t max_abs_ = 0;
};

extern const std::string_view kBlosum62Text;

}  // namespace cstar
