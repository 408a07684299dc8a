#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Column-comparison kernels over gapped rows. Each kernel has a scalar
// reference and vector variants; the variant is chosen once at startup from
// the CPU's feature bits and may be pinned for testing.

namespace cstar::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct PairCounts {
    uint64_t mismatches = 0;  // both residues present and different
    uint64_t comparable = 0;  // both residues present
    friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

/// Inputs to every kernel have equal length `n`.
namespace scalar {
PairCounts pair_counts(const char* a, const char* b, std::size_t n) noexcept;
uint64_t sp_columns(const char* a, const char* b, std::size_t n) noexcept;
std::size_t common_prefix(const char* a, const char* b, std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
PairCounts pair_counts(const char* a, const char* b, std::size_t n) noexcept;
uint64_t sp_columns(const char* a, const char* b, std::size_t n) noexcept;
std::size_t common_prefix(const char* a, const char* b, std::size_t n) noexcept;
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
PairCounts pair_counts(const char* a, const char* b, std::size_t n) noexcept;
uint64_t sp_columns(const char* a, const char* b, std::size_t n) noexcept;
std::size_t common_prefix(const char* a, const char* b, std::size_t n) noexcept;
}  // namespace neon
#endif

bool supported(Isa isa) noexcept;
/// Best variant the running CPU supports.
Isa detected_isa() noexcept;
Isa active_isa() noexcept;
/// Pins the dispatch; returns false (and changes nothing) if unsupported.
bool set_active_isa(Isa isa) noexcept;

/// Dispatched entry points.
PairCounts pair_counts(std::string_view a, std::string_view b) noexcept;
/// Sum-of-pairs column penalty: 2 per single-gap column, 1 per differing
/// residue pair, 0 otherwise.
uint64_t sp_columns(std::string_view a, std::string_view b) noexcept;
/// Length of the longest common prefix.
std::size_t common_prefix(std::string_view a, std::string_view b) noexcept;

}  // namespace cstar::kernels
