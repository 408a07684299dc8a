#include "cstar/anchor.hpp"

#include <algorithm>
#include <deque>

#include "cstar/error.hpp"

namespace cstar {

int KmerTrie::code(char c) noexcept {
    switch (c) {
        case 'A': return 0;
        case 'C': return 1;
        case 'G': return 2;
        case 'T':
        case 'U': return 3;
        default: return -1;
    }
}

KmerTrie KmerTrie::build(std::string_view center, std::size_t k) {
    if (k < 1) throw Error(ErrorKind::KTooSmall, "k-mer length must be at least 1");
    if (k > center.size()) {
        throw Error(ErrorKind::KTooLarge,
                    "k = " + std::to_string(k) + " exceeds center length " + std::to_string(center.size()));
    }

    KmerTrie t;
    t.k_ = k;
    t.center_length_ = center.size();
    t.nodes_.emplace_back();

    // next offset at which a full valid k-mer could start
    std::size_t valid_from = 0;
    for (std::size_t end = 0; end < center.size(); ++end) {
        if (code(center[end]) < 0) {
            valid_from = end + 1;
            continue;
        }
        if (end + 1 < k || end + 1 - k < valid_from) continue;
        const std::size_t start = end + 1 - k;
        int32_t cur = kRoot;
        for (std::size_t p = start; p <= end; ++p) {
            const int c = code(center[p]);
            int32_t next = t.nodes_[static_cast<std::size_t>(cur)].child[static_cast<std::size_t>(c)];
            if (next == kNone) {
                next = static_cast<int32_t>(t.nodes_.size());
                Node n;
                n.parent = cur;
                n.depth = t.nodes_[static_cast<std::size_t>(cur)].depth + 1;
                n.symbol = static_cast<uint8_t>(c);
                t.nodes_.push_back(n);
                t.nodes_[static_cast<std::size_t>(cur)].child[static_cast<std::size_t>(c)] = next;
            }
            cur = next;
        }
        auto& leaf = t.nodes_[static_cast<std::size_t>(cur)];
        if (leaf.leaf == kNone) {
            leaf.leaf = static_cast<int32_t>(t.offsets_.size());
            t.offsets_.emplace_back();
        }
        t.offsets_[static_cast<std::size_t>(leaf.leaf)].push_back(static_cast<uint32_t>(start));
    }

    // breadth-first failure links
    std::deque<int32_t> queue;
    for (int32_t child : t.nodes_[kRoot].child) {
        if (child != kNone) queue.push_back(child);
    }
    while (!queue.empty()) {
        const int32_t u = queue.front();
        queue.pop_front();
        for (std::size_t c = 0; c < 4; ++c) {
            const int32_t v = t.nodes_[static_cast<std::size_t>(u)].child[c];
            if (v == kNone) continue;
            int32_t f = t.nodes_[static_cast<std::size_t>(u)].fail;
            while (f != kRoot && t.nodes_[static_cast<std::size_t>(f)].child[c] == kNone) {
                f = t.nodes_[static_cast<std::size_t>(f)].fail;
            }
            const int32_t target = t.nodes_[static_cast<std::size_t>(f)].child[c];
            t.nodes_[static_cast<std::size_t>(v)].fail = (target != kNone && target != v) ? target : kRoot;
            queue.push_back(v);
        }
    }
    return t;
}

std::optional<int32_t> KmerTrie::find(std::string_view s) const {
    int32_t cur = kRoot;
    for (char ch : s) {
        const int c = code(ch);
        if (c < 0) return std::nullopt;
        cur = nodes_[static_cast<std::size_t>(cur)].child[static_cast<std::size_t>(c)];
        if (cur == kNone) return std::nullopt;
    }
    return cur;
}

std::string KmerTrie::spell(int32_t id) const {
    static constexpr char kLetters[] = {'A', 'C', 'G', 'T'};
    std::string s;
    while (id != kRoot) {
        const Node& n = node(id);
        s.push_back(kLetters[n.symbol]);
        id = n.parent;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::map<std::string, std::vector<uint32_t>> KmerTrie::leaves() const {
    std::map<std::string, std::vector<uint32_t>> out;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        if (nodes_[id].leaf != kNone) {
            out.emplace(spell(static_cast<int32_t>(id)), offsets_[static_cast<std::size_t>(nodes_[id].leaf)]);
        }
    }
    return out;
}

std::vector<KmerHit> match_stream(const KmerTrie& trie, std::string_view query, MatchStats* stats) {
    std::vector<KmerHit> hits;
    uint64_t transitions = 0;
    const auto k = static_cast<uint32_t>(trie.k());
    int32_t state = KmerTrie::kRoot;
    for (std::size_t p = 0; p < query.size(); ++p) {
        const int c = KmerTrie::code(query[p]);
        if (c < 0) {
            if (state != KmerTrie::kRoot) ++transitions;
            state = KmerTrie::kRoot;
            continue;
        }
        const auto sym = static_cast<std::size_t>(c);
        while (state != KmerTrie::kRoot && trie.node(state).child[sym] == KmerTrie::kNone) {
            state = trie.node(state).fail;
            ++transitions;
        }
        const int32_t next = trie.node(state).child[sym];
        if (next != KmerTrie::kNone) {
            state = next;
            ++transitions;
        }
        const int32_t leaf = trie.node(state).leaf;
        if (leaf != KmerTrie::kNone) {
            const auto query_start = static_cast<uint32_t>(p + 1 - k);
            for (uint32_t off : trie.offsets(leaf)) hits.push_back({off, query_start, k});
        }
    }
    if (stats != nullptr) stats->transitions += transitions;
    return hits;
}

std::vector<KmerHit> match_stream(const KmerTrie& trie, const Sequence& query, AlphabetKind center_kind,
                                  MatchStats* stats) {
    if (query.residues.empty()) throw Error(ErrorKind::EmptyInput, "query '" + query.id + "' is empty");
    if (query.kind != center_kind) {
        throw Error(ErrorKind::AlphabetMismatch, "query '" + query.id + "' is " + std::string(to_string(query.kind)) +
                                                     ", center is " + std::string(to_string(center_kind)));
    }
    return match_stream(trie, std::string_view(query.residues), stats);
}

std::vector<AnchorGap> AnchorChain::gaps() const {
    std::vector<AnchorGap> out;
    out.reserve(anchors.size() + 1);
    std::size_t c = 0;
    std::size_t q = 0;
    for (const auto& a : anchors) {
        out.push_back({{c, a.center_start}, {q, a.query_start}});
        c = a.center_end();
        q = a.query_end();
    }
    out.push_back({{c, center_len}, {q, query_len}});
    return out;
}

std::size_t AnchorChain::anchored_residues() const noexcept {
    std::size_t total = 0;
    for (const auto& a : anchors) total += a.length;
    return total;
}

std::vector<Anchor> merge_hits(std::span<const KmerHit> hits) {
    std::vector<KmerHit> sorted(hits.begin(), hits.end());
    auto diagonal = [](const KmerHit& h) {
        return static_cast<int64_t>(h.query_start) - static_cast<int64_t>(h.center_start);
    };
    std::sort(sorted.begin(), sorted.end(), [&](const KmerHit& x, const KmerHit& y) {
        const int64_t dx = diagonal(x);
        const int64_t dy = diagonal(y);
        return dx != dy ? dx < dy : x.query_start < y.query_start;
    });

    std::vector<Anchor> blocks;
    for (const auto& h : sorted) {
        if (!blocks.empty()) {
            Anchor& last = blocks.back();
            const bool same_diagonal = static_cast<int64_t>(last.query_start) - last.center_start == diagonal(h);
            if (same_diagonal && h.query_start <= last.query_end()) {
                last.length = std::max(last.query_end(), h.query_start + h.length) - last.query_start;
                continue;
            }
        }
        blocks.push_back({h.center_start, h.query_start, h.length});
    }
    std::sort(blocks.begin(), blocks.end(), [](const Anchor& x, const Anchor& y) {
        return x.center_start != y.center_start ? x.center_start < y.center_start : x.query_start < y.query_start;
    });
    return blocks;
}

AnchorChain chain_anchors(std::span<const KmerHit> hits, std::size_t center_len, std::size_t query_len) {
    AnchorChain chain;
    chain.center_len = center_len;
    chain.query_len = query_len;
    const std::vector<Anchor> blocks = merge_hits(hits);
    if (blocks.empty()) return chain;

    const std::size_t count = blocks.size();
    std::vector<int64_t> best(count);
    std::vector<int64_t> pred(count, -1);
    std::vector<uint32_t> trim(count, 0);
    for (std::size_t j = 0; j < count; ++j) {
        const Anchor& b = blocks[j];
        best[j] = b.length;
        for (std::size_t i = 0; i < j; ++i) {
            const Anchor& a = blocks[i];
            if (a.center_start >= b.center_start || a.query_start >= b.query_start) continue;
            if (a.center_end() >= b.center_end() || a.query_end() >= b.query_end()) continue;
            const uint32_t overlap = std::max({0u, a.center_end() > b.center_start ? a.center_end() - b.center_start : 0u,
                                               a.query_end() > b.query_start ? a.query_end() - b.query_start : 0u});
            if (overlap >= b.length) continue;
            const int64_t candidate = best[i] + b.length - overlap;
            if (candidate > best[j]) {
                best[j] = candidate;
                pred[j] = static_cast<int64_t>(i);
                trim[j] = overlap;
            }
        }
    }

    std::size_t end = 0;
    for (std::size_t j = 1; j < count; ++j) {
        if (best[j] > best[end]) end = j;
    }
    for (int64_t j = static_cast<int64_t>(end); j >= 0; j = pred[static_cast<std::size_t>(j)]) {
        const auto idx = static_cast<std::size_t>(j);
        Anchor a = blocks[idx];
        a.center_start += trim[idx];
        a.query_start += trim[idx];
        a.length -= trim[idx];
        chain.anchors.push_back(a);
    }
    std::reverse(chain.anchors.begin(), chain.anchors.end());
    return chain;
}

}  // namespace cstar
