#include "cstar/msa.hpp"

#include <algorithm>
#include <cmath>

#include "cstar/error.hpp"
#include "cstar/kernels.hpp"

namespace cstar {

namespace {

void push_op(EditScript& script, char op, uint32_t len) {
    if (len == 0) return;
    if (!script.empty() && script.back().op == op) {
        script.back().len += len;
    } else {
        script.push_back({op, len});
    }
}

std::size_t isqrt_ceil(std::size_t n) {
    auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (r * r < n) ++r;
    while (r > 0 && (r - 1) * (r - 1) >= n) --r;
    return r;
}

void append(PairAlignment& out, const PairAlignment& piece) {
    out.aligned_a += piece.aligned_a;
    out.aligned_b += piece.aligned_b;
    out.cells += piece.cells;
}

// identical nucleotide sequences align to themselves without gaps whenever
// every residue's self-score is positive and at least any substitution
bool identity_is_optimal(std::string_view s, const ScoreScheme& scheme) {
    for (char c : std::string_view("ACGTU")) {
        for (char d : std::string_view("ACGTUN")) {
            if (scheme.score(c, c) <= 0 || scheme.score(c, d) > scheme.score(c, c)) return false;
        }
    }
    return std::all_of(s.begin(), s.end(), [](char c) { return KmerTrie::code(c) >= 0; });
}

}  // namespace

EditScript to_edit_script(const PairAlignment& pair) {
    EditScript script;
    for (std::size_t c = 0; c < pair.aligned_a.size(); ++c) {
        const bool gap_center = pair.aligned_a[c] == kGap;
        const bool gap_query = pair.aligned_b[c] == kGap;
        if (gap_center && gap_query) continue;
        push_op(script, gap_center ? 'I' : (gap_query ? 'D' : 'M'), 1);
    }
    return script;
}

std::vector<std::pair<uint32_t, uint32_t>> center_gap_runs(const EditScript& script) {
    std::vector<std::pair<uint32_t, uint32_t>> runs;
    uint32_t offset = 0;
    for (const auto& op : script) {
        if (op.op == 'I') {
            if (!runs.empty() && runs.back().first == offset) {
                runs.back().second += op.len;
            } else {
                runs.emplace_back(offset, op.len);
            }
        } else {
            offset += op.len;
        }
    }
    return runs;
}

void GapLedger::add(std::size_t seq_index, EditScript script) {
    for (const auto& [offset, run] : center_gap_runs(script)) {
        if (offset >= center_gaps.size()) {
            throw Error(ErrorKind::InconsistentCenter, "gap offset beyond the center's end");
        }
        center_gaps[offset] = std::max(center_gaps[offset], run);
    }
    per_seq.at(seq_index) = std::move(script);
}

std::size_t GapLedger::total_columns() const noexcept {
    std::size_t total = center_gaps.size() - 1;
    for (uint32_t g : center_gaps) total += g;
    return total;
}

std::string render_center_row(std::string_view center, std::span<const uint32_t> center_gaps) {
    std::string row;
    for (std::size_t o = 0; o <= center.size(); ++o) {
        row.append(center_gaps[o], kGap);
        if (o < center.size()) row.push_back(center[o]);
    }
    return row;
}

std::string render_row(const EditScript& script, std::string_view query, std::span<const uint32_t> center_gaps) {
    std::string row;
    std::size_t offset = 0;      // center residues consumed
    std::size_t q = 0;           // query residues consumed
    std::size_t inserted = 0;    // own insertions at the current offset
    auto pad = [&]() {
        row.append(center_gaps[offset] - inserted, kGap);
        inserted = 0;
    };
    for (const auto& op : script) {
        for (uint32_t k = 0; k < op.len; ++k) {
            if (op.op == 'I') {
                row.push_back(query[q++]);
                ++inserted;
                continue;
            }
            pad();
            row.push_back(op.op == 'M' ? query[q++] : kGap);
            ++offset;
        }
    }
    pad();
    return row;
}

std::vector<std::size_t> center_candidates(std::size_t n) {
    const std::size_t c = std::min(n, isqrt_ceil(n));
    const std::size_t stride = std::max<std::size_t>(1, n / c);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < c && i * stride < n; ++i) out.push_back(i * stride);
    return out;
}

std::vector<std::size_t> center_probes(std::size_t n, std::size_t candidate) {
    const std::size_t c = std::min(n, isqrt_ceil(n));
    std::vector<std::size_t> out;
    if (n - 1 <= c) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i != candidate) out.push_back(i);
        }
        return out;
    }
    const std::size_t stride = std::max<std::size_t>(1, n / c);
    for (std::size_t i = 0; i < c; ++i) {
        const std::size_t idx = i * stride + stride / 2;
        if (idx < n && idx != candidate) out.push_back(idx);
    }
    return out;
}

std::size_t select_center(std::span<const Sequence> seqs, CenterMode mode, std::size_t kmer,
                          const ScoreScheme* scheme, const RunConfig& run) {
    if (seqs.size() < 2) throw Error(ErrorKind::TooFewSequences, "center selection needs at least 2 sequences");
    if (mode == CenterMode::First) return 0;

    const std::size_t n = seqs.size();
    const auto candidates = center_candidates(n);
    const bool protein = seqs.front().kind == AlphabetKind::Protein;
    const ScoreScheme fallback = protein ? ScoreScheme::blosum62() : ScoreScheme::default_nucleotide();
    const ScoreScheme& sc = scheme != nullptr ? *scheme : fallback;

    auto score_candidate = [&](std::size_t ci) -> int64_t {
        const std::size_t cand = candidates[ci];
        const auto probes = center_probes(n, cand);
        int64_t total = 0;
        if (protein) {
            for (std::size_t p : probes) total += sw_score(seqs[cand].residues, seqs[p].residues, sc);
            return total;
        }
        const std::size_t k = std::min(kmer, seqs[cand].size());
        const KmerTrie trie = KmerTrie::build(seqs[cand].residues, k);
        for (std::size_t p : probes) total += static_cast<int64_t>(match_stream(trie, seqs[p].residues).size());
        return total;
    };
    const std::vector<int64_t> scores = par_map(candidates.size(), score_candidate, run);

    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return candidates[best];
}

void left_align_gaps(PairAlignment& pair) {
    // slides each gap run in `x` left while the residue it displaces keeps an
    // identical partner in `y`; returns whether anything moved
    auto shift_runs = [](std::string& x, const std::string& y) {
        bool moved = false;
        std::size_t c = 0;
        while (c < x.size()) {
            if (x[c] != kGap) {
                ++c;
                continue;
            }
            std::size_t s = c;
            std::size_t e = c;
            while (e < x.size() && x[e] == kGap) ++e;
            const std::size_t old_s = s;
            while (s > 0 && x[s - 1] != kGap && y[s - 1] != kGap && y[s - 1] == y[e - 1]) {
                std::swap(x[s - 1], x[e - 1]);
                --s;
                --e;
            }
            moved = moved || s != old_s;
            if (s != old_s && s > 0 && x[s - 1] == kGap) {
                // merged into the previous run; revisit the combined run
                c = s - 1;
                while (c > 0 && x[c - 1] == kGap) --c;
            } else {
                c = e;
            }
        }
        return moved;
    };
    bool moved = true;
    while (moved) {
        moved = shift_runs(pair.aligned_a, pair.aligned_b);
        moved = shift_runs(pair.aligned_b, pair.aligned_a) || moved;
    }
}

PairAlignment align_to_center(const Sequence& center, const Sequence& query, const ScoreScheme& scheme,
                              const KmerTrie* trie) {
    if (center.kind != query.kind) {
        throw Error(ErrorKind::AlphabetMismatch, "'" + query.id + "' does not share the center's alphabet");
    }
    const std::string_view c = center.residues;
    const std::string_view q = query.residues;

    if (center.kind != AlphabetKind::Protein && c.size() == q.size() && kernels::common_prefix(c, q) == c.size() &&
        identity_is_optimal(c, scheme)) {
        PairAlignment out;
        out.aligned_a = std::string(c);
        out.aligned_b = std::string(q);
        out.span_a = {0, c.size()};
        out.span_b = {0, q.size()};
        out.score = score_alignment(out.aligned_a, out.aligned_b, scheme);
        return out;
    }

    if (center.kind == AlphabetKind::Protein || trie == nullptr || q.size() < trie->k()) {
        return global_align(c, q, scheme);
    }

    const auto hits = match_stream(*trie, q);
    const AnchorChain chain = chain_anchors(hits, c.size(), q.size());
    if (chain.anchors.empty()) return global_align(c, q, scheme);

    PairAlignment out;
    out.mode = AlignMode::Global;
    out.span_a = {0, c.size()};
    out.span_b = {0, q.size()};
    const auto gaps = chain.gaps();
    for (std::size_t g = 0; g < gaps.size(); ++g) {
        const auto& gap = gaps[g];
        append(out, global_align(c.substr(gap.center.begin, gap.center.size()),
                                 q.substr(gap.query.begin, gap.query.size()), scheme));
        if (g < chain.anchors.size()) {
            const Anchor& an = chain.anchors[g];
            out.aligned_a.append(c.substr(an.center_start, an.length));
            out.aligned_b.append(q.substr(an.query_start, an.length));
        }
    }
    left_align_gaps(out);
    out.score = score_alignment(out.aligned_a, out.aligned_b, scheme);
    return out;
}

PairAlignment align_to_center(const Sequence& center, const Sequence& query, const ScoreScheme& scheme,
                              const MsaConfig& cfg) {
    if (center.kind == AlphabetKind::Protein || cfg.kmer > center.size() || cfg.kmer < 1) {
        return align_to_center(center, query, scheme, static_cast<const KmerTrie*>(nullptr));
    }
    const KmerTrie trie = KmerTrie::build(center.residues, cfg.kmer);
    return align_to_center(center, query, scheme, &trie);
}

Msa merge_alignments(const Sequence& center, std::span<const CenterPair> pairs) {
    std::size_t n_rows = center.index + 1;
    for (const auto& p : pairs) n_rows = std::max(n_rows, p.index + 1);

    GapLedger ledger(center.size(), n_rows);
    std::vector<std::string> queries(n_rows);
    std::vector<std::string> ids(n_rows);
    std::vector<bool> present(n_rows, false);
    for (const auto& p : pairs) {
        if (strip_gaps(p.alignment.aligned_a) != center.residues) {
            throw Error(ErrorKind::InconsistentCenter, "pair for '" + p.id + "' is not aligned to the center");
        }
        ledger.add(p.index, to_edit_script(p.alignment));
        queries[p.index] = strip_gaps(p.alignment.aligned_b);
        ids[p.index] = p.id;
        present[p.index] = true;
    }

    Msa msa;
    msa.kind = center.kind;
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (i == center.index && !present[i]) {
            msa.rows.push_back({center.id, render_center_row(center.residues, ledger.center_gaps)});
        } else if (present[i]) {
            msa.rows.push_back({ids[i], render_row(ledger.per_seq[i], queries[i], ledger.center_gaps)});
        }
    }
    msa.n_cols = ledger.total_columns();
    validate_msa(msa, true);
    return msa;
}

Msa run_msa(std::span<const Sequence> seqs, const ScoreScheme& scheme, const MsaConfig& cfg, RunReport* report) {
    if (seqs.size() < 2) throw Error(ErrorKind::TooFewSequences, "alignment needs at least 2 sequences");
    for (const auto& s : seqs) {
        if (s.kind != seqs.front().kind) {
            throw Error(ErrorKind::AlphabetMismatch, "'" + s.id + "' does not share the dataset's alphabet");
        }
        if (s.residues.empty()) throw Error(ErrorKind::EmptyInput, "'" + s.id + "' is empty");
    }

    std::size_t center_idx = 0;
    {
        StageTimer timer(report, "select_center");
        center_idx = select_center(seqs, cfg.center_mode, cfg.kmer, &scheme, cfg.run);
        timer.finish(1, 1, 1);
    }
    const Sequence& center = seqs[center_idx];

    // the broadcast: center, trie and scheme stay immutable while workers run
    std::optional<KmerTrie> trie;
    if (center.kind != AlphabetKind::Protein && cfg.kmer >= 1 && cfg.kmer <= center.size()) {
        trie = KmerTrie::build(center.residues, cfg.kmer);
    }
    const KmerTrie* shared_trie = trie ? &*trie : nullptr;

    struct Mapped {
        EditScript script;
        uint64_t cells = 0;
    };
    auto align_one = [&](std::size_t i) -> Mapped {
        if (i == center_idx) return {{{'M', static_cast<uint32_t>(center.size())}}, 0};
        PairAlignment pair = align_to_center(center, seqs[i], scheme, shared_trie);
        return {to_edit_script(pair), pair.cells};
    };
    struct Reduced {
        GapLedger ledger;
        uint64_t cells = 0;
    };
    Reduced reduced = par_map_reduce(
        seqs.size(), align_one, Reduced{GapLedger(center.size(), seqs.size()), 0},
        [](Reduced& acc, std::size_t i, Mapped&& m) {
            acc.cells += m.cells;
            acc.ledger.add(i, std::move(m.script));
        },
        cfg.run, report, "align");
    trie.reset();

    const GapLedger& ledger = reduced.ledger;
    auto render = [&](std::size_t i) -> std::string {
        if (i == center_idx) return render_center_row(center.residues, ledger.center_gaps);
        return render_row(ledger.per_seq[i], seqs[i].residues, ledger.center_gaps);
    };
    std::vector<std::string> rows = par_map(seqs.size(), render, cfg.run, report, "merge");

    Msa msa;
    msa.kind = center.kind;
    msa.n_cols = ledger.total_columns();
    msa.rows.reserve(seqs.size());
    for (std::size_t i = 0; i < seqs.size(); ++i) msa.rows.push_back({seqs[i].id, std::move(rows[i])});
    validate_msa(msa, true);

    if (report != nullptr) {
        report->dp_cells += reduced.cells;
        report->extra.emplace_back("center_index", std::to_string(center_idx));
        report->extra.emplace_back("n_cols", std::to_string(msa.n_cols));
    }
    return msa;
}

}  // namespace cstar
