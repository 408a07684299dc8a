#include "cstar/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "cstar/error.hpp"
#include "cstar/metrics.hpp"
#include "cstar/msa.hpp"
#include "cstar/phylo.hpp"
#include "cstar/scoring.hpp"
#include "cstar/seqio.hpp"

namespace cstar {

namespace {

enum class Exit { Ok = 0, Usage = 1, Data = 2, Internal = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::size_t threads = 0;
    uint64_t seed = 0;
    std::string report;
    std::string config;
};

struct AlignArgs {
    std::string in, out, type, center, matrix;
    std::size_t kmer = kDefaultKmer;
    int32_t match = 1, mismatch = -1;
    std::optional<int32_t> gap_open, gap_extend;
    bool permissive = false;
};

struct TreeArgs {
    std::string in, out, type;
    double balance_cap = 0.10;
    std::size_t direct_threshold = 2000;
    std::size_t kmer = kDefaultKmer;
    bool force_cluster = false, align_first = false, permissive = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sub->add_option("--seed", c.seed, "Seed for every sampling step")->capture_default_str();
    sub->add_option("--report", c.report, "Write run telemetry to FILE (key=value) and FILE.json");
    sub->add_option("--config", c.config, "key=value file; flags on the command line win");
}

// Fills options the command line left unset from a key=value file.
void apply_config(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open config '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "config") throw UsageError(path + ": config files cannot nest");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (opt->count() > 0) continue;
        for (const CLI::Option* other : opt->get_excludes()) {
            if (other->count() > 0) {
                throw UsageError("--" + key + " (from " + path + ") conflicts with " + other->get_name());
            }
        }
        opt->add_result(value);
        opt->run_callback();
    }
}

AlphabetKind parse_type(const std::string& type) {
    if (type == "dna") return AlphabetKind::Dna;
    if (type == "rna") return AlphabetKind::Rna;
    return AlphabetKind::Protein;
}

ParseOptions parse_options(const std::string& type, bool permissive, bool allow_gaps) {
    ParseOptions po;
    if (!type.empty()) po.alphabet_hint = parse_type(type);
    po.permissive = permissive;
    po.allow_gaps = allow_gaps;
    return po;
}

ScoreScheme make_scheme(const AlignArgs& a, AlphabetKind kind) {
    const bool protein = kind == AlphabetKind::Protein;
    const int32_t open = a.gap_open.value_or(protein ? 11 : 2);
    const int32_t extend = a.gap_extend.value_or(1);
    if (!a.matrix.empty()) return ScoreScheme::from_matrix_file(a.matrix, open, extend);
    if (protein) return ScoreScheme::blosum62(open, extend);
    return ScoreScheme::nucleotide(a.match, a.mismatch, open, extend);
}

void finish_report(RunReport& report, const Common& c, const RunConfig& run) {
    if (c.report.empty()) return;
    report.threads = run.resolved_threads();
    report.peak_rss_bytes = memory::peak_rss_bytes();
    report.write(c.report);
}

Exit cmd_align(const AlignArgs& a, const Common& c) {
    const FastaRecords recs = parse_fasta(read_input(a.in), parse_options(a.type, a.permissive, false));
    MsaConfig cfg;
    cfg.kmer = a.kmer;
    cfg.run = RunConfig{c.threads, 0, c.seed};
    const bool protein = recs.alphabet.kind == AlphabetKind::Protein;
    if (a.center.empty()) {
        cfg.center_mode = protein ? CenterMode::Sampled : CenterMode::First;
    } else {
        cfg.center_mode = a.center == "sampled" ? CenterMode::Sampled : CenterMode::First;
    }
    RunReport report;
    const Msa msa = run_msa(recs.sequences, make_scheme(a, recs.alphabet.kind), cfg, &report);
    write_fasta_file(msa, a.out);
    finish_report(report, c, cfg.run);
    return Exit::Ok;
}

Exit cmd_score(const std::string& in, const Common& c, std::ostream& out) {
    const Msa msa = parse_msa(read_input(in), parse_options("", true, true));
    RunConfig run{c.threads, 0, c.seed};
    RunReport report;
    StageTimer timer(&report, "sp");
    const SpReport sp = sp_report(msa, run);
    timer.finish(msa.size(), task_count(msa.size(), run.resolved_chunk(msa.size())), run.resolved_threads());
    out << "rows\t" << msa.size() << '\n'
        << "columns\t" << msa.n_cols << '\n'
        << "pairs\t" << sp.n_pairs << '\n'
        << "total_sp\t" << sp.total_sp << '\n'
        << "avg_sp\t" << sp.avg_text() << '\n';
    finish_report(report, c, run);
    return Exit::Ok;
}

Exit cmd_stats(const std::string& in, const std::string& type, bool permissive, std::ostream& out) {
    const FastaRecords recs = parse_fasta(read_input(in), parse_options(type, permissive, false));
    const DatasetStats s = dataset_stats(recs.sequences);
    std::ostringstream avg;
    avg.setf(std::ios::fixed);
    avg.precision(1);
    avg << s.avg_len;
    out << "alphabet\t" << to_string(recs.alphabet.kind) << '\n'
        << "count\t" << s.count << '\n'
        << "min_len\t" << s.min_len << '\n'
        << "max_len\t" << s.max_len << '\n'
        << "avg_len\t" << avg.str() << '\n'
        << "total_bytes\t" << s.total_bytes << '\n';
    return Exit::Ok;
}

Exit cmd_tree(const TreeArgs& t, const Common& c) {
    RunConfig run{c.threads, 0, c.seed};
    RunReport report;
    Msa msa;
    const std::string bytes = read_input(t.in);
    if (t.align_first) {
        const FastaRecords recs = parse_fasta(bytes, parse_options(t.type, t.permissive, false));
        if (recs.alphabet.kind == AlphabetKind::Protein) {
            throw Error(ErrorKind::ProteinUnsupported, "tree building is limited to nucleotide data");
        }
        MsaConfig cfg;
        cfg.kmer = t.kmer;
        cfg.run = run;
        msa = run_msa(recs.sequences, ScoreScheme::default_nucleotide(), cfg, &report);
    } else {
        msa = parse_msa(bytes, parse_options(t.type, true, true));
    }
    TreeConfig cfg;
    cfg.direct_threshold = t.direct_threshold;
    cfg.force_cluster = t.force_cluster;
    cfg.cluster.balance_cap = t.balance_cap;
    cfg.cluster.seed = c.seed;
    cfg.run = run;
    const PhyloTree tree = build_tree(msa, cfg, &report);
    write_newick_file(tree, t.out);
    finish_report(report, c, run);
    return Exit::Ok;
}

Exit cmd_treescore(const std::string& in, const std::string& tree_path, std::ostream& out) {
    const Msa msa = parse_msa(read_input(in), parse_options("", true, true));
    const PhyloTree tree = parse_newick(read_input(tree_path));
    const TreeScore s = jc69_loglik(msa, tree);
    out << "model\tJC69\n" << "log_likelihood\t" << format_length(s.log_likelihood) << '\n';
    return Exit::Ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Center-star multiple sequence alignment and neighbor-joining trees", "cstar"};
    app.set_version_flag("--version", std::string("cstar ") + kVersion);
    app.require_subcommand(1);

    const auto types = CLI::IsMember({"dna", "rna", "protein"});

    Common align_common, score_common, tree_common, treescore_common, stats_common;
    AlignArgs a;
    CLI::App* align = app.add_subcommand("align", "Align sequences around a center sequence");
    align->add_option("--in", a.in, "Input FASTA (plain or gzip)")->required();
    align->add_option("--out", a.out, "Aligned FASTA output")->required();
    align->add_option("--type", a.type, "Alphabet; detected from the first record when omitted")->check(types);
    align->add_option("--kmer", a.kmer, "Anchor k-mer length")->capture_default_str()->check(CLI::Range(1, 32));
    align->add_option("--center", a.center, "Center choice (default: first for nucleotides, sampled for protein)")
        ->check(CLI::IsMember({"first", "sampled"}));
    auto* match = align->add_option("--match", a.match, "Match score")->capture_default_str();
    auto* mismatch = align->add_option("--mismatch", a.mismatch, "Mismatch score")->capture_default_str();
    align->add_option("--gap-open", a.gap_open, "Gap open penalty (default 2, protein 11)");
    align->add_option("--gap-extend", a.gap_extend, "Gap extension penalty (default 1)");
    auto* matrix = align->add_option("--matrix", a.matrix, "NCBI-format substitution matrix file");
    matrix->excludes(match)->excludes(mismatch);
    align->add_flag("--permissive", a.permissive, "Accept IUPAC ambiguity codes");
    add_common(align, align_common);

    std::string score_in;
    CLI::App* score = app.add_subcommand("score", "Sum-of-pairs score of an aligned FASTA");
    score->add_option("--in", score_in, "Aligned FASTA")->required();
    add_common(score, score_common);

    TreeArgs t;
    CLI::App* tree = app.add_subcommand("tree", "Neighbor-joining tree from an alignment");
    tree->add_option("--in", t.in, "Aligned FASTA, or raw FASTA with --align-first")->required();
    tree->add_option("--out", t.out, "Newick output")->required();
    tree->add_flag("--force-cluster", t.force_cluster, "Use the clustered path regardless of size");
    tree->add_option("--balance-cap", t.balance_cap, "Largest cluster as a fraction of all rows")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    tree->add_option("--direct-threshold", t.direct_threshold, "Largest input joined directly")->capture_default_str();
    tree->add_flag("--align-first", t.align_first, "Align the input before building the tree");
    tree->add_option("--type", t.type, "Alphabet of the input")->check(types);
    tree->add_option("--kmer", t.kmer, "Anchor k-mer length for --align-first")
        ->capture_default_str()
        ->check(CLI::Range(1, 32));
    tree->add_flag("--permissive", t.permissive, "Accept IUPAC ambiguity codes");
    add_common(tree, tree_common);

    std::string ts_in, ts_tree;
    CLI::App* treescore = app.add_subcommand("treescore", "JC69 log-likelihood of a tree");
    treescore->add_option("--in", ts_in, "Aligned FASTA")->required();
    treescore->add_option("--tree", ts_tree, "Newick tree")->required();
    add_common(treescore, treescore_common);

    std::string st_in, st_type;
    bool st_permissive = false;
    CLI::App* stats = app.add_subcommand("stats", "Sequence count and length statistics");
    stats->add_option("--in", st_in, "FASTA (plain or gzip)")->required();
    stats->add_option("--type", st_type, "Alphabet of the input")->check(types);
    stats->add_flag("--permissive", st_permissive, "Accept IUPAC ambiguity codes");
    add_common(stats, stats_common);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        const std::pair<CLI::App*, Common*> subs[] = {{align, &align_common},
                                                      {score, &score_common},
                                                      {tree, &tree_common},
                                                      {treescore, &treescore_common},
                                                      {stats, &stats_common}};
        for (const auto& [sub, common] : subs) {
            if (sub->parsed() && !common->config.empty()) apply_config(sub, common->config);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(Exit::Usage);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(Exit::Usage);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(Exit::Data);
    }

    try {
        Exit code = Exit::Ok;
        if (align->parsed()) code = cmd_align(a, align_common);
        if (score->parsed()) code = cmd_score(score_in, score_common, out);
        if (tree->parsed()) code = cmd_tree(t, tree_common);
        if (treescore->parsed()) code = cmd_treescore(ts_in, ts_tree, out);
        if (stats->parsed()) code = cmd_stats(st_in, st_type, st_permissive, out);
        return static_cast<int>(code);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::TaskPanic ? static_cast<int>(Exit::Internal) : static_cast<int>(Exit::Data);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return static_cast<int>(Exit::Internal);
    }
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace cstar
