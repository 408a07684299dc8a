#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "cstar/msa.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cstar;
using testutil::error_kind_of;
using testutil::to_sequences;

namespace {

std::string strip(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c != '-') out += c;
    return out;
}

std::vector<std::string> rows_of(const Msa& msa) {
    std::vector<std::string> out;
    for (const auto& r : msa.rows) out.push_back(r.row);
    return out;
}

MsaConfig config(std::size_t kmer, std::size_t threads = 1) {
    MsaConfig cfg;
    cfg.kmer = kmer;
    cfg.run.threads = threads;
    return cfg;
}

std::vector<std::string> clone_family(std::mt19937_64& rng, std::size_t n, std::size_t len, std::size_t max_edits) {
    const std::string base = oracle::random_dna(rng, len);
    std::vector<std::string> out{base};
    while (out.size() < n) out.push_back(oracle::mutate(rng, base, rng() % (max_edits + 1)));
    return out;
}

CenterPair pair_of(std::size_t index, std::string a, std::string b) {
    CenterPair p;
    p.index = index;
    p.id = "s" + std::to_string(index);
    p.alignment.aligned_a = std::move(a);
    p.alignment.aligned_b = std::move(b);
    return p;
}

}  // namespace

TEST_CASE("center selection") {
    const auto seqs = to_sequences({"ACGTACGTAC", "TTTTGGGGCC", "ACGTACGTAC"});
    CHECK(select_center(seqs, CenterMode::First) == 0);

    const auto same = to_sequences({"ACGTACGTAC", "ACGTACGTAC", "ACGTACGTAC", "ACGTACGTAC", "ACGTACGTAC"});
    CHECK(select_center(same, CenterMode::Sampled, 4) == 0);

    std::mt19937_64 rng(4);
    const auto x = oracle::random_dna(rng, 30), y = oracle::random_dna(rng, 30), z = oracle::random_dna(rng, 30);
    const auto hub = to_sequences({x + oracle::random_dna(rng, 30), y + oracle::random_dna(rng, 30), x + y + z,
                                   z + oracle::random_dna(rng, 30)});
    CHECK(select_center(hub, CenterMode::Sampled, 8) == 2);

    CHECK(error_kind_of([] { select_center(to_sequences({"ACGT"}), CenterMode::First); }) ==
          ErrorKind::TooFewSequences);
}

TEST_CASE("stride samples") {
    CHECK(center_candidates(4) == std::vector<std::size_t>{0, 2});
    CHECK(center_candidates(10) == std::vector<std::size_t>{0, 2, 4, 6});
    CHECK(center_probes(4, 0) == std::vector<std::size_t>{1, 3});
    CHECK(center_probes(3, 1) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("protein center selection uses local alignment scores") {
    const auto seqs = to_sequences({"MKVLITGG", "WWWWHHHH", "MKVLITGG", "MKVLITGA"}, AlphabetKind::Protein);
    const auto scheme = ScoreScheme::blosum62();
    CHECK(select_center(seqs, CenterMode::Sampled, kDefaultKmer, &scheme) == 0);
}

TEST_CASE("align_to_center examples") {
    const auto scheme = ScoreScheme::default_nucleotide();
    const Sequence c{"c", "ACGTACGT", 0, AlphabetKind::Dna};
    const auto self = align_to_center(c, c, scheme, config(3));
    CHECK(self.aligned_a == "ACGTACGT");
    CHECK(self.aligned_b == "ACGTACGT");

    const Sequence q{"q", "ACGACGT", 1, AlphabetKind::Dna};
    const auto del = align_to_center(c, q, scheme, config(3));
    CHECK(del.aligned_a == "ACGTACGT");
    CHECK(std::count(del.aligned_b.begin(), del.aligned_b.end(), '-') == 1);
    CHECK(strip(del.aligned_b) == "ACGACGT");
    const auto [x, y] = oracle::naive_global("ACGTACGT", "ACGACGT", oracle::Scheme{});
    CHECK(del.aligned_a == x);
    CHECK(del.aligned_b == y);

    const Sequence tiny{"t", "ACG", 2, AlphabetKind::Dna};
    const auto fallback = align_to_center(c, tiny, scheme, config(5));
    const auto plain = global_align(c, tiny, scheme);
    CHECK(fallback.aligned_a == plain.aligned_a);
    CHECK(fallback.aligned_b == plain.aligned_b);
}

TEST_CASE("left-aligned gaps keep score and residues") {
    std::mt19937_64 rng(8);
    const auto scheme = ScoreScheme::default_nucleotide();
    for (int round = 0; round < 300; ++round) {
        const auto a = oracle::random_dna(rng, 5 + rng() % 40);
        const auto b = oracle::mutate(rng, a, rng() % 6);
        PairAlignment p = global_align(a, b, scheme);
        const int64_t before = score_alignment(p.aligned_a, p.aligned_b, scheme);
        left_align_gaps(p);
        CHECK(strip(p.aligned_a) == a);
        CHECK(strip(p.aligned_b) == b);
        CHECK(score_alignment(p.aligned_a, p.aligned_b, scheme) == before);
    }
    PairAlignment shifted;
    shifted.aligned_a = "ACGTTTA";
    shifted.aligned_b = "ACGTT-A";
    left_align_gaps(shifted);
    CHECK(shifted.aligned_b == "ACG-TTA");
}

TEST_CASE("merge examples") {
    const Sequence c{"s0", "ACGT", 0, AlphabetKind::Dna};
    const std::vector<CenterPair> identity{pair_of(1, "ACGT", "ACGT"), pair_of(2, "ACGT", "ACGT")};
    const Msa same = merge_alignments(c, identity);
    CHECK(rows_of(same) == std::vector<std::string>{"ACGT", "ACGT", "ACGT"});
    CHECK(same.n_cols == 4);

    const std::vector<CenterPair> runs{pair_of(1, "AC-GT", "ACTGT"), pair_of(2, "AC---GT", "ACTTTGT")};
    const Msa merged = merge_alignments(c, runs);
    CHECK(rows_of(merged) == std::vector<std::string>{"AC---GT", "ACT--GT", "ACTTTGT"});

    const std::vector<CenterPair> wrong{pair_of(1, "ACGA", "ACGT")};
    CHECK(error_kind_of([&] { merge_alignments(c, wrong); }) == ErrorKind::InconsistentCenter);
}

TEST_CASE("ledger keeps per-offset maxima") {
    GapLedger ledger(4, 3);
    PairAlignment p1, p2;
    p1.aligned_a = "AC-GT";
    p1.aligned_b = "ACTGT";
    p2.aligned_a = "AC---GT-";
    p2.aligned_b = "ACTTTGTA";
    ledger.add(1, to_edit_script(p1));
    ledger.add(2, to_edit_script(p2));
    CHECK(ledger.center_gaps == std::vector<uint32_t>{0, 0, 3, 0, 1});
    CHECK(ledger.total_columns() == 8);
    CHECK(ledger.per_seq_gaps(1) == std::vector<std::pair<uint32_t, uint32_t>>{{2, 1}});
    CHECK(ledger.per_seq_gaps(2) == std::vector<std::pair<uint32_t, uint32_t>>{{2, 3}, {4, 1}});
}

TEST_CASE("three-sequence merge equals the full-DP oracle") {
    const std::vector<std::string> seqs{"ACGT", "AGT", "ACGGT"};
    const Msa msa = run_msa(to_sequences(seqs), ScoreScheme::nucleotide(1, -1, 1, 1), config(2));
    oracle::Scheme unit{1, -1, 1, 1};
    CHECK(rows_of(msa) == oracle::naive_center_star(seqs, 0, unit));
}

TEST_CASE("run_msa examples") {
    const auto scheme = ScoreScheme::default_nucleotide();
    const Msa two = run_msa(to_sequences({"ACGTAC", "ACGTAC"}), scheme, config(3));
    CHECK(rows_of(two) == std::vector<std::string>{"ACGTAC", "ACGTAC"});

    std::mt19937_64 rng(12);
    const std::string base = oracle::random_dna(rng, 50);
    std::string sub = base;
    sub[20] = sub[20] == 'A' ? 'C' : 'A';
    const Msa subst = run_msa(to_sequences({base, base, base, sub}), scheme, config(8));
    CHECK(subst.n_cols == base.size());
    for (const auto& r : subst.rows) CHECK(r.row.find('-') == std::string::npos);

    for (int round = 0; round < 5; ++round) {
        const std::string b = oracle::random_dna(rng, 60);
        std::vector<std::string> seqs;
        for (int i = 0; i < 8; ++i) seqs.push_back(oracle::mutate(rng, b, rng() % 3));
        const Msa msa = run_msa(to_sequences(seqs), scheme, config(kDefaultKmer));
        CHECK(rows_of(msa) == oracle::naive_center_star(seqs, 0, oracle::Scheme{}));
    }
}

TEST_CASE("rows recover inputs and no column is all gaps") {
    std::mt19937_64 rng(13);
    for (int round = 0; round < 100; ++round) {
        const auto seqs = clone_family(rng, 2 + rng() % 6, 10 + rng() % 60, 5);
        const Msa msa = run_msa(to_sequences(seqs), ScoreScheme::default_nucleotide(), config(3 + rng() % 10));
        REQUIRE(msa.size() == seqs.size());
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            CHECK(msa.rows[i].id == "s" + std::to_string(i));
            CHECK(msa.rows[i].row.size() == msa.n_cols);
            CHECK(strip(msa.rows[i].row) == seqs[i]);
        }
        for (std::size_t col = 0; col < msa.n_cols; ++col) {
            bool any = false;
            for (const auto& r : msa.rows) any = any || r.row[col] != '-';
            CHECK(any);
        }
        // max-merge dominance: width is the center plus the widest run per offset
        CHECK(msa.n_cols == strip(msa.rows[0].row).size() +
                                static_cast<std::size_t>(std::count(msa.rows[0].row.begin(), msa.rows[0].row.end(), '-')));
    }
}

TEST_CASE("output is independent of the thread count") {
    std::mt19937_64 rng(14);
    for (int round = 0; round < 10; ++round) {
        const auto seqs = to_sequences(clone_family(rng, 40, 200, 6));
        const auto scheme = ScoreScheme::default_nucleotide();
        const Msa one = run_msa(seqs, scheme, config(kDefaultKmer, 1));
        CHECK(run_msa(seqs, scheme, config(kDefaultKmer, 2)) == one);
        CHECK(run_msa(seqs, scheme, config(kDefaultKmer, 8)) == one);
        MsaConfig sampled = config(kDefaultKmer, 3);
        sampled.center_mode = CenterMode::Sampled;
        sampled.run.chunk_size = 1;
        const Msa s3 = run_msa(seqs, scheme, sampled);
        sampled.run.threads = 1;
        sampled.run.chunk_size = 0;
        CHECK(run_msa(seqs, scheme, sampled) == s3);
    }
}

TEST_CASE("anchoring skips most of the DP on near-identical clones") {
    std::mt19937_64 rng(15);
    const std::string base = oracle::random_dna(rng, 2000);
    std::vector<std::string> seqs{base};
    for (int i = 0; i < 20; ++i) seqs.push_back(oracle::mutate(rng, base, 2 + rng() % 10));
    RunReport report;
    const Msa msa = run_msa(to_sequences(seqs), ScoreScheme::default_nucleotide(), config(kDefaultKmer), &report);
    const double n = static_cast<double>(seqs.size()), m = static_cast<double>(base.size());
    CHECK(static_cast<double>(report.dp_cells) < 0.10 * n * m * m);
    CHECK(report.stage("align") != nullptr);
}

TEST_CASE("protein pipeline aligns globally") {
    const auto seqs = to_sequences({"MKVLITGGA", "MKVITGGA", "MKVLITGGAW"}, AlphabetKind::Protein);
    MsaConfig cfg = config(kDefaultKmer);
    cfg.center_mode = CenterMode::Sampled;
    const Msa msa = run_msa(seqs, ScoreScheme::blosum62(), cfg);
    for (std::size_t i = 0; i < seqs.size(); ++i) CHECK(strip(msa.rows[i].row) == seqs[i].residues);
    CHECK(msa.kind == AlphabetKind::Protein);
}

TEST_CASE("run_msa input errors") {
    const auto scheme = ScoreScheme::default_nucleotide();
    CHECK(error_kind_of([&] { run_msa(to_sequences({"ACGT"}), scheme, config(3)); }) == ErrorKind::TooFewSequences);
    auto mixed = to_sequences({"ACGT", "ACGU"});
    mixed[1].kind = AlphabetKind::Rna;
    CHECK(error_kind_of([&] { run_msa(mixed, scheme, config(3)); }) == ErrorKind::AlphabetMismatch);
}
