#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cstar/metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"
#include "tree_util.hpp"

using namespace cstar;
using testutil::error_kind_of;
using testutil::to_msa;

namespace {

std::vector<std::string> random_rows(std::mt19937_64& rng, std::size_t n, std::size_t len, const char* alphabet,
                                     std::size_t alphabet_size) {
    std::vector<std::string> rows(n, std::string(len, 'A'));
    for (auto& r : rows)
        for (auto& c : r) c = alphabet[rng() % alphabet_size];
    return rows;
}

}  // namespace

TEST_CASE("sp_pair examples") {
    CHECK(sp_pair("ACGT", "ACGT") == 0);
    CHECK(sp_pair("AC-G", "ACTG") == 2);
    CHECK(sp_pair("A-CT", "AGC-") == 4);
    CHECK(sp_pair("A-CT", "AGC-") == static_cast<uint64_t>(oracle::naive_sp({"A-CT", "AGC-"})));
    CHECK(sp_pair("A--C", "A--G") == 1);
    CHECK(error_kind_of([] { sp_pair("AC", "ACG"); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("sp_pair symmetry and shared gap columns") {
    std::mt19937_64 rng(1);
    for (int round = 0; round < 200; ++round) {
        const auto rows = random_rows(rng, 2, rng() % 70, "ACGT-", 5);
        CHECK(sp_pair(rows[0], rows[1]) == sp_pair(rows[1], rows[0]));
        const std::size_t at = rng() % (rows[0].size() + 1);
        std::string a = rows[0], b = rows[1];
        a.insert(at, "-");
        b.insert(at, "-");
        CHECK(sp_pair(a, b) == sp_pair(rows[0], rows[1]));
    }
}

TEST_CASE("sp_report examples") {
    const SpReport same = sp_report(to_msa({"ACG", "ACG", "ACG"}));
    CHECK(same.total_sp == 0);
    CHECK(same.avg_sp == 0.0);
    CHECK(same.n_pairs == 3);

    const SpReport r = sp_report(to_msa({"AC", "AC", "AG"}));
    CHECK(r.total_sp == 2);
    CHECK(r.n_pairs == 3);
    CHECK(r.avg_sp == doctest::Approx(2.0 / 3.0));
    CHECK(r.avg_text() == "0.7");

    CHECK(error_kind_of([] { sp_report(to_msa({"ACG"})); }) == ErrorKind::TooFewSequences);
}

TEST_CASE("avg text rounds the exact ratio") {
    SpReport r;
    r.n_pairs = 4;
    r.total_sp = 1;  // 0.25
    CHECK(r.avg_text() == "0.3");
    r.total_sp = 3;  // 0.75
    CHECK(r.avg_text() == "0.8");
    r.n_pairs = 1;
    r.total_sp = 123456789;
    CHECK(r.avg_text() == "123456789.0");
}

TEST_CASE("sp_report equals the brute-force column scan") {
    std::mt19937_64 rng(2);
    for (int round = 0; round < 200; ++round) {
        const auto rows = random_rows(rng, 2 + rng() % 5, 1 + rng() % 50, "ACGT-", 5);
        const SpReport r = sp_report(to_msa(rows), RunConfig{1 + rng() % 3, 0, 0});
        CHECK(r.total_sp == static_cast<uint64_t>(oracle::naive_sp(rows)));
        CHECK(r.n_pairs == rows.size() * (rows.size() - 1) / 2);
    }
}

TEST_CASE("JC69 limits on two leaves") {
    PhyloTree t;
    const int a = t.add_node("a");
    const int b = t.add_node("b");
    t.add_edge(a, b, 1e-12);
    Msa same = to_msa({"A", "A"});
    same.rows[0].id = "a";
    same.rows[1].id = "b";
    CHECK(jc69_loglik(same, t).log_likelihood == doctest::Approx(std::log(0.25)).epsilon(1e-9));

    PhyloTree far;
    far.add_node("a");
    far.add_node("b");
    far.add_edge(0, 1, 200.0);
    Msa diff = to_msa({"A", "C"});
    diff.rows[0].id = "a";
    diff.rows[1].id = "b";
    CHECK(jc69_loglik(diff, far).log_likelihood == doctest::Approx(std::log(1.0 / 16.0)).epsilon(1e-9));
}

TEST_CASE("JC69 matches state enumeration and doubles under column duplication") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 50; ++round) {
        const std::size_t leaves = 3 + rng() % 3;
        const auto ref = oracle::random_tree(rng, leaves, 0.05, 2.0);
        auto rows = random_rows(rng, leaves, 1 + rng() % 20, "ACGT-N", 6);
        Msa msa = to_msa(rows);
        for (std::size_t i = 0; i < leaves; ++i) msa.rows[i].id = ref.labels[i];
        const PhyloTree tree = testutil::to_phylo(ref);
        const double got = jc69_loglik(msa, tree).log_likelihood;
        const double expect = oracle::brute_jc69(ref, rows);
        CHECK(got <= 0.0);
        CHECK(std::abs(got - expect) <= 1e-9 * std::abs(expect));

        Msa twice = msa;
        for (auto& r : twice.rows) r.row += r.row;
        twice.n_cols *= 2;
        CHECK(jc69_loglik(twice, tree).log_likelihood == doctest::Approx(2.0 * got).epsilon(1e-12));
    }
}

TEST_CASE("JC69 scaling keeps deep trees finite") {
    std::mt19937_64 rng(4);
    const auto ref = oracle::random_tree(rng, 400, 1.0, 3.0);
    Msa msa = to_msa(random_rows(rng, 400, 5, "ACGT", 4));
    for (std::size_t i = 0; i < 400; ++i) msa.rows[i].id = ref.labels[i];
    const double v = jc69_loglik(msa, testutil::to_phylo(ref)).log_likelihood;
    CHECK(std::isfinite(v));
    CHECK(v < 0.0);
}

TEST_CASE("JC69 input errors") {
    PhyloTree t;
    t.add_node("s0");
    t.add_node("s1");
    t.add_edge(0, 1, 0.1);
    CHECK(error_kind_of([&] { jc69_loglik(to_msa({"MK", "MV"}, AlphabetKind::Protein), t); }) ==
          ErrorKind::ProteinUnsupported);
    CHECK(error_kind_of([&] { jc69_loglik(to_msa({"AC", "AG", "AT"}), t); }) == ErrorKind::LeafMismatch);
    Msa renamed = to_msa({"AC", "AG"});
    renamed.rows[1].id = "zz";
    CHECK(error_kind_of([&] { jc69_loglik(renamed, t); }) == ErrorKind::LeafMismatch);
}
