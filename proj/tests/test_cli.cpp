#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "cstar/cli.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = cstar::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("cstar_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(file(name), std::ios::binary) << text;
        return file(name);
    }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string clone_fasta(uint64_t seed, std::size_t n, std::size_t len) {
    std::mt19937_64 rng(seed);
    const std::string base = oracle::random_dna(rng, len);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += ">seq" + std::to_string(i) + "\n" + oracle::mutate(rng, base, rng() % 4) + "\n";
    return out;
}

}  // namespace

TEST_CASE("align writes an aligned FASTA") {
    TempDir dir;
    const auto in = dir.write("x.fasta", clone_fasta(1, 6, 80));
    const auto out = dir.file("y.fasta");
    const Run r = run({"align", "--in", in, "--out", out, "--type", "dna"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    const std::string text = slurp(out);
    CHECK(text.rfind(">seq0\n", 0) == 0);
    CHECK(text.find(">seq5\n") != std::string::npos);
}

TEST_CASE("missing input is a data error naming the path") {
    TempDir dir;
    const Run r = run({"align", "--in", dir.file("missing.fasta"), "--out", dir.file("y.fasta")});
    CHECK(r.code == 2);
    CHECK(r.err.find("missing.fasta") != std::string::npos);
}

TEST_CASE("usage errors") {
    TempDir dir;
    const auto in = dir.write("x.fasta", clone_fasta(2, 3, 40));
    const Run conflict = run({"align", "--match", "1", "--matrix", "blosum62.txt", "--in", in, "--out", dir.file("o")});
    CHECK(conflict.code == 1);
    CHECK(conflict.err.find("--match") != std::string::npos);
    CHECK(conflict.err.find("--matrix") != std::string::npos);

    CHECK(run({"align", "--in", in, "--out", dir.file("o"), "--bogus"}).code == 1);
    CHECK(run({"align", "--in", in}).code == 1);
    CHECK(run({"align", "--in", in, "--out", dir.file("o"), "--type", "xna"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
}

TEST_CASE("data errors") {
    TempDir dir;
    const auto bad = dir.write("bad.fasta", ">a\nAC-GT\n");
    const Run r = run({"align", "--in", bad, "--out", dir.file("o")});
    CHECK(r.code == 2);
    CHECK(r.err.find("IllegalResidue") != std::string::npos);
    const auto one = dir.write("one.fasta", ">a\nACGT\n");
    CHECK(run({"align", "--in", one, "--out", dir.file("o")}).code == 2);
}

TEST_CASE("help lists every declared flag") {
    const std::map<std::string, std::vector<std::string>> flags{
        {"align",
         {"--in", "--out", "--type", "--kmer", "--center", "--threads", "--match", "--mismatch", "--gap-open",
          "--gap-extend", "--matrix", "--report", "--config", "--seed"}},
        {"score", {"--in", "--threads", "--report"}},
        {"tree",
         {"--in", "--out", "--seed", "--force-cluster", "--balance-cap", "--threads", "--align-first", "--report"}},
        {"treescore", {"--in", "--tree", "--threads", "--report"}},
        {"stats", {"--in", "--threads", "--report"}},
    };
    for (const auto& [sub, names] : flags) {
        const Run r = run({sub, "--help"});
        CHECK(r.code == 0);
        for (const auto& f : names) {
            INFO(sub, " ", f);
            CHECK(r.out.find(f) != std::string::npos);
        }
    }
    const Run v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(cstar::kVersion) != std::string::npos);
}

TEST_CASE("config file fills unset flags; the command line wins") {
    TempDir dir;
    const auto in = dir.write("x.fasta", clone_fasta(3, 5, 60));
    const auto cfg = dir.write("run.cfg", "# comment\nkmer = 4\nthreads=2\nreport=" + dir.file("rep.txt") + "\n");
    CHECK(run({"align", "--in", in, "--out", dir.file("a.fasta"), "--config", cfg}).code == 0);
    CHECK(fs::exists(dir.file("rep.txt")));
    CHECK(fs::exists(dir.file("rep.txt.json")));
    CHECK(slurp(dir.file("rep.txt")).find("threads=2") != std::string::npos);

    CHECK(run({"align", "--in", in, "--out", dir.file("b.fasta"), "--config", cfg, "--threads", "1", "--report",
               dir.file("rep2.txt")})
              .code == 0);
    CHECK(slurp(dir.file("rep2.txt")).find("threads=1") != std::string::npos);

    const auto bad = dir.write("bad.cfg", "nonsense=1\n");
    CHECK(run({"align", "--in", in, "--out", dir.file("c.fasta"), "--config", bad}).code == 1);
    const auto clash = dir.write("clash.cfg", "matrix=whatever.txt\n");
    CHECK(run({"align", "--in", in, "--out", dir.file("c.fasta"), "--config", clash, "--match", "2"}).code == 1);
    CHECK(run({"align", "--in", in, "--out", dir.file("c.fasta"), "--config", dir.file("nope.cfg")}).code == 2);
}

TEST_CASE("score prints total and average sum-of-pairs") {
    TempDir dir;
    const auto in = dir.write("a.fasta", ">a\nAC\n>b\nAC\n>c\nAG\n");
    const Run r = run({"score", "--in", in});
    CHECK(r.code == 0);
    CHECK(r.out.find("total_sp\t2\n") != std::string::npos);
    CHECK(r.out.find("avg_sp\t0.7\n") != std::string::npos);
    CHECK(r.out.find("pairs\t3\n") != std::string::npos);
}

TEST_CASE("stats prints count and lengths") {
    TempDir dir;
    const auto in = dir.write("s.fasta", ">a\nAC\n>b\nACGT\n>c\nACGTAC\n");
    const Run r = run({"stats", "--in", in});
    CHECK(r.code == 0);
    CHECK(r.out.find("count\t3\n") != std::string::npos);
    CHECK(r.out.find("min_len\t2\n") != std::string::npos);
    CHECK(r.out.find("max_len\t6\n") != std::string::npos);
    CHECK(r.out.find("avg_len\t4.0\n") != std::string::npos);
    CHECK(r.out.find("total_bytes\t12\n") != std::string::npos);
}

TEST_CASE("tree and treescore") {
    TempDir dir;
    const auto raw = dir.write("raw.fasta", clone_fasta(4, 12, 100));
    const auto aln = dir.file("aln.fasta");
    REQUIRE(run({"align", "--in", raw, "--out", aln}).code == 0);
    const auto nwk = dir.file("t.nwk");
    CHECK(run({"tree", "--in", aln, "--out", nwk}).code == 0);
    const std::string tree = slurp(nwk);
    CHECK(tree.size() > 2);
    CHECK(tree.substr(tree.size() - 2) == ";\n");

    const auto nwk2 = dir.file("t2.nwk");
    CHECK(run({"tree", "--in", raw, "--out", nwk2, "--align-first"}).code == 0);
    CHECK(slurp(nwk2) == tree);

    const Run s = run({"treescore", "--in", aln, "--tree", nwk});
    CHECK(s.code == 0);
    CHECK(s.out.find("log_likelihood\t-") != std::string::npos);

    const auto clustered = dir.file("c.nwk");
    CHECK(run({"tree", "--in", aln, "--out", clustered, "--force-cluster", "--seed", "9", "--balance-cap", "0.5",
               "--report", dir.file("tree_report.txt")})
              .code == 0);
    CHECK(slurp(dir.file("tree_report.txt")).find("clusters=") != std::string::npos);

    const auto other = dir.write("other.nwk", "(x,y,z);\n");
    CHECK(run({"treescore", "--in", aln, "--tree", other}).code == 2);
}

TEST_CASE("outputs are identical across thread counts") {
    TempDir dir;
    const auto raw = dir.write("raw.fasta", clone_fasta(5, 30, 300));
    std::string first_aln, first_tree;
    for (const char* threads : {"1", "2", "8"}) {
        const auto aln = dir.file(std::string("aln") + threads);
        const auto nwk = dir.file(std::string("tree") + threads);
        REQUIRE(run({"align", "--in", raw, "--out", aln, "--threads", threads, "--seed", "5"}).code == 0);
        REQUIRE(run({"tree", "--in", aln, "--out", nwk, "--threads", threads, "--seed", "5", "--force-cluster"}).code ==
                0);
        if (first_aln.empty()) {
            first_aln = slurp(aln);
            first_tree = slurp(nwk);
        } else {
            CHECK(slurp(aln) == first_aln);
            CHECK(slurp(nwk) == first_tree);
        }
    }
}
