#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cstar/pairwise.hpp"
#include "cstar/sequence.hpp"

namespace cstar {

inline constexpr std::size_t kDefaultKmer = 15;

/// Keyword tree over every k-mer of one center sequence, with Aho-Corasick
/// failure links. Immutable once built and safe to share across threads.
/// K-mers containing anything other than A, C, G, T/U are not indexed.
class KmerTrie {
public:
    static constexpr int32_t kNone = -1;
    static constexpr int32_t kRoot = 0;

    struct Node {
        std::array<int32_t, 4> child{kNone, kNone, kNone, kNone};
        int32_t fail = kRoot;
        int32_t parent = kNone;
        int32_t depth = 0;
        int32_t leaf = kNone;  // index into leaf offsets when depth == k
        uint8_t symbol = 0;    // edge label from parent
    };

    static KmerTrie build(std::string_view center, std::size_t k);

    std::size_t k() const noexcept { return k_; }
    std::size_t center_length() const noexcept { return center_length_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t leaf_count() const noexcept { return offsets_.size(); }
    const Node& node(int32_t id) const { return nodes_.at(static_cast<std::size_t>(id)); }

    /// Node spelling `s`, if present.
    std::optional<int32_t> find(std::string_view s) const;
    std::string spell(int32_t id) const;
    /// Sorted center offsets of a leaf.
    std::span<const uint32_t> offsets(int32_t leaf) const { return offsets_.at(static_cast<std::size_t>(leaf)); }
    /// Every indexed k-mer with its offsets.
    std::map<std::string, std::vector<uint32_t>> leaves() const;

    /// 0..3 for A, C, G, T/U; -1 for everything else.
    static int code(char c) noexcept;

private:
    std::size_t k_ = 0;
    std::size_t center_length_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::vector<uint32_t>> offsets_;
};

struct KmerHit {
    uint32_t center_start = 0;
    uint32_t query_start = 0;
    uint32_t length = 0;
    friend bool operator==(const KmerHit&, const KmerHit&) = default;
    friend auto operator<=>(const KmerHit&, const KmerHit&) = default;
};

struct MatchStats {
    uint64_t transitions = 0;  // goto steps plus failure-link steps
};

/// Every (center, query) k-mer coincidence, ordered by query_start then
/// center_start, from a single pass over the query.
std::vector<KmerHit> match_stream(const KmerTrie& trie, std::string_view query, MatchStats* stats = nullptr);
std::vector<KmerHit> match_stream(const KmerTrie& trie, const Sequence& query, AlphabetKind center_kind,
                                  MatchStats* stats = nullptr);

struct Anchor {
    uint32_t center_start = 0;
    uint32_t query_start = 0;
    uint32_t length = 0;
    uint32_t center_end() const noexcept { return center_start + length; }
    uint32_t query_end() const noexcept { return query_start + length; }
    friend bool operator==(const Anchor&, const Anchor&) = default;
};

struct AnchorGap {
    Span center;
    Span query;
};

struct AnchorChain {
    std::vector<Anchor> anchors;
    std::size_t center_len = 0;
    std::size_t query_len = 0;

    /// Unmatched regions before, between and after the anchors
    /// (anchors.size() + 1 entries, possibly empty).
    std::vector<AnchorGap> gaps() const;
    std::size_t anchored_residues() const noexcept;
};

/// Diagonal-adjacent hits are first merged into maximal exact blocks. The
/// chain maximizes total anchored residues; a block overlapping its chain
/// predecessor is trimmed at its start. Ties go to the smaller center_start.
AnchorChain chain_anchors(std::span<const KmerHit> hits, std::size_t center_len, std::size_t query_len);

/// Same-diagonal hits merged into maximal blocks, sorted by (center, query).
std::vector<Anchor> merge_hits(std::span<const KmerHit> hits);

}  // namespace cstar
