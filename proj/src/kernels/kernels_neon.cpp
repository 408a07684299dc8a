// AArch64 only; NEON is part of the base ISA there.
#if defined(__aarch64__)
#include <arm_neon.h>

#include "cstar/kernels.hpp"

namespace cstar::kernels::neon {

namespace {

constexpr std::size_t kLanes = 16;

// number of 0xFF lanes in a comparison result
inline uint64_t count_set(uint8x16_t mask) noexcept {
    return vaddvq_u8(vshrq_n_u8(mask, 7));
}

}  // namespace

PairCounts pair_counts(const char* a, const char* b, std::size_t n) noexcept {
    const uint8x16_t gap = vdupq_n_u8('-');
    PairCounts out;
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const uint8x16_t va = vld1q_u8(reinterpret_cast<const uint8_t*>(a + i));
        const uint8x16_t vb = vld1q_u8(reinterpret_cast<const uint8_t*>(b + i));
        const uint8x16_t any_gap = vorrq_u8(vceqq_u8(va, gap), vceqq_u8(vb, gap));
        const uint8x16_t both = vmvnq_u8(any_gap);
        out.comparable += count_set(both);
        out.mismatches += count_set(vandq_u8(both, vmvnq_u8(vceqq_u8(va, vb))));
    }
    const PairCounts tail = scalar::pair_counts(a + i, b + i, n - i);
    out.comparable += tail.comparable;
    out.mismatches += tail.mismatches;
    return out;
}

uint64_t sp_columns(const char* a, const char* b, std::size_t n) noexcept {
    const uint8x16_t gap = vdupq_n_u8('-');
    uint64_t total = 0;
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const uint8x16_t va = vld1q_u8(reinterpret_cast<const uint8_t*>(a + i));
        const uint8x16_t vb = vld1q_u8(reinterpret_cast<const uint8_t*>(b + i));
        const uint8x16_t ga = vceqq_u8(va, gap);
        const uint8x16_t gb = vceqq_u8(vb, gap);
        const uint8x16_t one_gap = veorq_u8(ga, gb);
        const uint8x16_t differ = vandq_u8(vmvnq_u8(vorrq_u8(ga, gb)), vmvnq_u8(vceqq_u8(va, vb)));
        total += 2 * count_set(one_gap) + count_set(differ);
    }
    return total + scalar::sp_columns(a + i, b + i, n - i);
}

std::size_t common_prefix(const char* a, const char* b, std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const uint8x16_t va = vld1q_u8(reinterpret_cast<const uint8_t*>(a + i));
        const uint8x16_t vb = vld1q_u8(reinterpret_cast<const uint8_t*>(b + i));
        if (vminvq_u8(vceqq_u8(va, vb)) != 0xFF) break;
    }
    return i + scalar::common_prefix(a + i, b + i, n - i);
}

}  // namespace cstar::kernels::neon
#endif
