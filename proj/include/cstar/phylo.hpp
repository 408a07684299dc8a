#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cstar/engine.hpp"
#include "cstar/sequence.hpp"

namespace cstar {

struct DistMatrix {
    std::size_t n = 0;
    std::vector<double> d;  // row-major n x n
    std::vector<std::string> labels;
    std::size_t incomparable_pairs = 0;  // pairs with no gap-free column, set to 1

    double operator()(std::size_t i, std::size_t j) const { return d[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return d[i * n + j]; }
};

/// Unrooted tree as an adjacency list. Leaves carry labels; internal nodes
/// do not.
class PhyloTree {
public:
    struct Link {
        int neighbor = -1;
        double length = 0.0;
    };
    struct Node {
        std::string label;
        std::vector<Link> links;
    };

    int add_node(std::string label = {});
    void add_edge(int a, int b, double length);
    void remove_edge(int a, int b);
    /// Merges the two edges of every unlabelled degree-2 node.
    void suppress_unary();

    std::size_t node_count() const noexcept { return nodes_.size(); }
    const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    bool is_leaf(int id) const { return !node(id).label.empty(); }
    std::vector<int> leaf_ids() const;
    std::vector<std::string> leaf_labels() const;  // sorted
    int find_leaf(std::string_view label) const;   // -1 if absent
    double edge_length(int a, int b) const;        // NaN if not adjacent
    /// Nodes still referenced by an edge or carrying a label.
    std::vector<int> live_nodes() const;

    /// Every non-trivial and pendant bipartition, keyed by the side not
    /// containing the smallest label, with its edge length.
    std::vector<std::pair<std::set<std::string>, double>> splits() const;

private:
    std::vector<Node> nodes_;
};

/// Fraction of mismatching residues over columns where neither row has a
/// gap; 1 for pairs with no such column.
DistMatrix p_distance(const Msa& msa, const RunConfig& run = {});

/// One join of the neighbor-joining loop, recorded for inspection.
struct NjStep {
    std::vector<std::string> active;        // labels of current taxa (internal nodes as "#id")
    std::vector<std::vector<double>> dist;  // distances among `active`
    std::size_t first = 0;                  // joined positions within `active`
    std::size_t second = 0;
};

/// Saitou-Nei neighbor joining. Joins the pair minimizing
/// Q(i,j) = (r-2) d(i,j) - R_i - R_j, ties to the lexicographically smallest
/// slot pair; a negative branch estimate is clamped to 0 and its deficit
/// taken from the sibling branch.
PhyloTree nj_build(const DistMatrix& d, std::vector<NjStep>* trace = nullptr);

struct ClusterConfig {
    double sample_frac = 0.10;
    double balance_cap = 0.10;
    uint64_t seed = 0;
};

struct ClusterPlan {
    std::vector<std::size_t> assignments;  // sequence -> cluster
    std::vector<std::size_t> medoids;      // cluster -> representative row
    std::vector<std::size_t> sizes;

    std::size_t cluster_count() const noexcept { return medoids.size(); }
};

/// Seeded sample, complete-linkage clustering of the sample into
/// ceil(sqrt(sample)) groups, medoids, nearest-medoid labelling of every
/// row, then rebalancing: clusters under 2 rows are folded into the nearest
/// medoid, clusters over ceil(balance_cap * n) are split in two until none
/// is. Fewer than 10 rows form one cluster.
ClusterPlan cluster_sequences(const Msa& msa, const ClusterConfig& cfg = {}, const RunConfig& run = {});

/// Indices drawn without replacement by a seeded generator; identical on
/// every platform.
std::vector<std::size_t> seeded_sample(std::size_t n, std::size_t count, uint64_t seed);

struct TreeConfig {
    std::size_t direct_threshold = 2000;
    bool force_cluster = false;
    ClusterConfig cluster;
    RunConfig run;
};

/// Direct neighbor joining up to `direct_threshold` rows; above it (or when
/// forced) cluster, build one tree per cluster, join the medoids into a
/// skeleton tree and graft each cluster tree onto its medoid's skeleton
/// branch.
PhyloTree build_tree(const Msa& msa, const TreeConfig& cfg = {}, RunReport* report = nullptr);

/// Symmetric difference of the non-trivial split sets.
std::size_t robinson_foulds(const PhyloTree& a, const PhyloTree& b);

// Newick
std::string write_newick(const PhyloTree& tree);
void write_newick(const PhyloTree& tree, std::ostream& sink);
void write_newick_file(const PhyloTree& tree, const std::string& path);
PhyloTree parse_newick(std::string_view text);
std::string format_length(double v);

}  // namespace cstar
