#include "cstar/kernels.hpp"

namespace cstar::kernels::scalar {

namespace {
constexpr char kGap = '-';
}

PairCounts pair_counts(const char* a, const char* b, std::size_t n) noexcept {
    PairCounts out;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == kGap || b[i] == kGap) continue;
        ++out.comparable;
        if (a[i] != b[i]) ++out.mismatches;
    }
    return out;
}

uint64_t sp_columns(const char* a, const char* b, std::size_t n) noexcept {
    uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool gap_a = a[i] == kGap;
        const bool gap_b = b[i] == kGap;
        if (gap_a != gap_b) {
            total += 2;
        } else if (!gap_a && a[i] != b[i]) {
            total += 1;
        }
    }
    return total;
}

std::size_t common_prefix(const char* a, const char* b, std::size_t n) noexcept {
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

}  // namespace cstar::kernels::scalar
