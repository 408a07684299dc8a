#include <algorithm>
#include <atomic>

#include "cstar/kernels.hpp"

namespace cstar::kernels {

namespace {

using PairCountsFn = PairCounts (*)(const char*, const char*, std::size_t) noexcept;
using SpColumnsFn = uint64_t (*)(const char*, const char*, std::size_t) noexcept;
using CommonPrefixFn = std::size_t (*)(const char*, const char*, std::size_t) noexcept;

struct Table {
    PairCountsFn pair_counts;
    SpColumnsFn sp_columns;
    CommonPrefixFn common_prefix;
};

constexpr Table kScalar{scalar::pair_counts, scalar::sp_columns, scalar::common_prefix};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2{avx2::pair_counts, avx2::sp_columns, avx2::common_prefix};
#endif
#if defined(__aarch64__)
constexpr Table kNeon{neon::pair_counts, neon::sp_columns, neon::common_prefix};
#endif

const Table& table_for(Isa isa) noexcept {
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::Avx2: return kAvx2;
#endif
#if defined(__aarch64__)
        case Isa::Neon: return kNeon;
#endif
        default: return kScalar;
    }
}

std::atomic<Isa>& active() noexcept {
    static std::atomic<Isa> isa{detected_isa()};
    return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

bool supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
        case Isa::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa detected_isa() noexcept {
    if (supported(Isa::Avx2)) return Isa::Avx2;
    if (supported(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) noexcept {
    if (!supported(isa)) return false;
    active().store(isa, std::memory_order_relaxed);
    return true;
}

PairCounts pair_counts(std::string_view a, std::string_view b) noexcept {
    return table_for(active_isa()).pair_counts(a.data(), b.data(), std::min(a.size(), b.size()));
}

uint64_t sp_columns(std::string_view a, std::string_view b) noexcept {
    return table_for(active_isa()).sp_columns(a.data(), b.data(), std::min(a.size(), b.size()));
}

std::size_t common_prefix(std::string_view a, std::string_view b) noexcept {
    return table_for(active_isa()).common_prefix(a.data(), b.data(), std::min(a.size(), b.size()));
}

}  // namespace cstar::kernels
