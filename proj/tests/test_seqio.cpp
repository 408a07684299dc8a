#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cstar/seqio.hpp"
#include "test_util.hpp"

using namespace cstar;
using testutil::error_kind_of;

TEST_CASE("single DNA record") {
    const auto recs = parse_fasta(">s1\nACGT\n");
    REQUIRE(recs.sequences.size() == 1);
    CHECK(recs.sequences[0].id == "s1");
    CHECK(recs.sequences[0].residues == "ACGT");
    CHECK(recs.sequences[0].index == 0);
    CHECK(recs.alphabet.kind == AlphabetKind::Dna);
}

TEST_CASE("multi-line protein body is concatenated") {
    const auto recs = parse_fasta(">p\nMKV\nLIT\n");
    REQUIRE(recs.sequences.size() == 1);
    CHECK(recs.sequences[0].residues == "MKVLIT");
    CHECK(recs.alphabet.kind == AlphabetKind::Protein);
}

TEST_CASE("gap on ingest is an illegal residue at its offset") {
    try {
        parse_fasta(">x\nAC-GT\n");
        FAIL("expected IllegalResidue");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IllegalResidue);
        const std::string msg = e.what();
        CHECK(msg.find("'x'") != std::string::npos);
        CHECK(msg.find("offset 2") != std::string::npos);
    }
}

TEST_CASE("alphabet detection") {
    CHECK(parse_fasta(">r\nACGU\n").alphabet.kind == AlphabetKind::Rna);
    CHECK(parse_fasta(">d\nacgtn\n").alphabet.kind == AlphabetKind::Dna);
    CHECK(parse_fasta(">d\nacgtn\n").sequences[0].residues == "ACGTN");
    CHECK(parse_fasta(">p\nMEEP\n").alphabet.kind == AlphabetKind::Protein);
    // a later record cannot switch the alphabet
    CHECK(error_kind_of([] { parse_fasta(">a\nACGT\n>b\nACGU\n"); }) == ErrorKind::IllegalResidue);
    ParseOptions hint;
    hint.alphabet_hint = AlphabetKind::Protein;
    CHECK(parse_fasta(">p\nACGT\n", hint).alphabet.kind == AlphabetKind::Protein);
}

TEST_CASE("ambiguity codes need permissive mode") {
    CHECK(error_kind_of([] { parse_fasta(">a\nACRT\n", {AlphabetKind::Dna, false, false}); }) ==
          ErrorKind::IllegalResidue);
    ParseOptions po;
    po.alphabet_hint = AlphabetKind::Dna;
    po.permissive = true;
    CHECK(parse_fasta(">a\nACRT\n", po).sequences[0].residues == "ACRT");
}

TEST_CASE("structural errors") {
    CHECK(error_kind_of([] { parse_fasta(""); }) == ErrorKind::EmptyFile);
    CHECK(error_kind_of([] { parse_fasta(" \n\n"); }) == ErrorKind::EmptyFile);
    CHECK(error_kind_of([] { parse_fasta("ACGT\n>a\nACGT\n"); }) == ErrorKind::MalformedHeader);
    CHECK(error_kind_of([] { parse_fasta(">\nACGT\n"); }) == ErrorKind::MalformedHeader);
    CHECK(error_kind_of([] { parse_fasta(">a\n>b\nACGT\n"); }) == ErrorKind::EmptyRecord);
}

TEST_CASE("header keeps the first token; CRLF tolerated") {
    const auto recs = parse_fasta(">seq1 some description\r\nAC\r\nGT\r\n>seq2\r\nTT\r\n");
    REQUIRE(recs.sequences.size() == 2);
    CHECK(recs.sequences[0].id == "seq1");
    CHECK(recs.sequences[0].residues == "ACGT");
    CHECK(recs.sequences[1].index == 1);
}

TEST_CASE("dataset stats") {
    const auto one = dataset_stats(testutil::to_sequences({"ACGT"}));
    CHECK(one.count == 1);
    CHECK(one.min_len == 4);
    CHECK(one.max_len == 4);
    CHECK(one.avg_len == 4.0);
    CHECK(one.total_bytes == 4);

    const auto three = dataset_stats(testutil::to_sequences({"AC", "ACGT", "ACGTAC"}));
    CHECK(three.count == 3);
    CHECK(three.min_len == 2);
    CHECK(three.max_len == 6);
    CHECK(three.avg_len == 4.0);
    CHECK(three.total_bytes == 12);

    CHECK(error_kind_of([] { dataset_stats({}); }) == ErrorKind::EmptyDataset);
}

TEST_CASE("stats scale with copies") {
    std::mt19937_64 rng(3);
    std::vector<std::string> base;
    for (int i = 0; i < 7; ++i) base.push_back(std::string(5 + rng() % 20, 'A'));
    std::vector<std::string> copies;
    for (int k = 0; k < 5; ++k) copies.insert(copies.end(), base.begin(), base.end());
    const auto s1 = dataset_stats(testutil::to_sequences(base));
    const auto s5 = dataset_stats(testutil::to_sequences(copies));
    CHECK(s5.count == 5 * s1.count);
    CHECK(s5.total_bytes == 5 * s1.total_bytes);
    CHECK(s5.min_len == s1.min_len);
    CHECK(s5.max_len == s1.max_len);
    CHECK(s5.avg_len == doctest::Approx(s1.avg_len).epsilon(1e-12));
}

TEST_CASE("write_fasta serializes in order") {
    Msa msa = testutil::to_msa({"AC-G", "ACTG"});
    msa.rows[0].id = "id1";
    msa.rows[1].id = "id2";
    std::ostringstream out;
    write_fasta(msa, out);
    CHECK(out.str() == ">id1\nAC-G\n>id2\nACTG\n");
    CHECK(error_kind_of([] {
              std::ostringstream o;
              write_fasta(Msa{}, o);
          }) == ErrorKind::EmptyDataset);
}

TEST_CASE("write then parse is the identity, with 80-column wrapping") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 50; ++round) {
        const std::size_t cols = 1 + rng() % 250;
        std::vector<std::string> rows;
        for (int r = 0; r < 4; ++r) {
            std::string row(cols, 'A');
            for (auto& c : row) c = "ACGT-"[rng() % 5];
            rows.push_back(row);
        }
        const Msa msa = testutil::to_msa(rows);
        std::ostringstream out;
        write_fasta(msa, out);
        std::istringstream lines(out.str());
        std::string line;
        while (std::getline(lines, line)) CHECK(line.size() <= kFastaLineWidth);
        ParseOptions po;
        po.allow_gaps = true;
        po.alphabet_hint = AlphabetKind::Dna;
        CHECK(parse_msa(out.str(), po) == msa);
    }
}

TEST_CASE("parse_msa rejects ragged rows") {
    ParseOptions po;
    po.allow_gaps = true;
    CHECK(error_kind_of([&] { parse_msa(">a\nAC-\n>b\nAC\n", po); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("read_input handles plain and gzip files") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto plain = (dir / "cstar_seqio_plain.fa").string();
    const auto packed = (dir / "cstar_seqio_packed.fa.gz").string();
    const std::string text = ">a\nACGT\n>b\nGGCC\n";
    std::ofstream(plain, std::ios::binary) << text;
    gzFile gz = gzopen(packed.c_str(), "wb");
    REQUIRE(gz != nullptr);
    gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
    gzclose(gz);

    CHECK(read_input(plain) == text);
    CHECK(read_input(packed) == text);
    try {
        read_input((dir / "cstar_no_such_file.fa").string());
        FAIL("expected IoFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IoFailure);
        CHECK(std::string(e.what()).find("cstar_no_such_file.fa") != std::string::npos);
    }
    std::remove(plain.c_str());
    std::remove(packed.c_str());
}
