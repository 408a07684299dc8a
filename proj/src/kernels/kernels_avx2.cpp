// Built with -mavx2; only reached when the CPU reports AVX2.
#include <immintrin.h>

#include "cstar/kernels.hpp"

namespace cstar::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 32;

struct Masks {
    uint32_t gap_a;
    uint32_t gap_b;
    uint32_t equal;
};

inline Masks load_masks(const char* a, const char* b, __m256i gap) noexcept {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b));
    return {static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, gap))),
            static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(vb, gap))),
            static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, vb)))};
}

}  // namespace

PairCounts pair_counts(const char* a, const char* b, std::size_t n) noexcept {
    const __m256i gap = _mm256_set1_epi8('-');
    PairCounts out;
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const Masks m = load_masks(a + i, b + i, gap);
        const uint32_t both = ~(m.gap_a | m.gap_b);
        out.comparable += static_cast<uint64_t>(__builtin_popcount(both));
        out.mismatches += static_cast<uint64_t>(__builtin_popcount(both & ~m.equal));
    }
    const PairCounts tail = scalar::pair_counts(a + i, b + i, n - i);
    out.comparable += tail.comparable;
    out.mismatches += tail.mismatches;
    return out;
}

uint64_t sp_columns(const char* a, const char* b, std::size_t n) noexcept {
    const __m256i gap = _mm256_set1_epi8('-');
    uint64_t total = 0;
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const Masks m = load_masks(a + i, b + i, gap);
        const uint32_t one_gap = m.gap_a ^ m.gap_b;
        const uint32_t differ = ~(m.gap_a | m.gap_b) & ~m.equal;
        total += 2u * static_cast<uint64_t>(__builtin_popcount(one_gap)) +
                 static_cast<uint64_t>(__builtin_popcount(differ));
    }
    return total + scalar::sp_columns(a + i, b + i, n - i);
}

std::size_t common_prefix(const char* a, const char* b, std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        const uint32_t equal = static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, vb)));
        if (equal != 0xFFFFFFFFu) return i + static_cast<std::size_t>(__builtin_ctz(~equal));
    }
    return i + scalar::common_prefix(a + i, b + i, n - i);
}

}  // namespace cstar::kernels::avx2
