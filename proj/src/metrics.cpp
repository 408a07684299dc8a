#include "cstar/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <unordered_map>

#include "cstar/error.hpp"
#include "cstar/kernels.hpp"

namespace cstar {

uint64_t sp_pair(std::string_view row_a, std::string_view row_b) {
    if (row_a.size() != row_b.size()) {
        throw Error(ErrorKind::LengthMismatch, "rows of length " + std::to_string(row_a.size()) + " and " +
                                                   std::to_string(row_b.size()));
    }
    return kernels::sp_columns(row_a, row_b);
}

std::string SpReport::avg_text() const {
    if (n_pairs == 0) return "0.0";
    // round(total * 10 / pairs) with halves going up, in integers
    const unsigned __int128 scaled = static_cast<unsigned __int128>(total_sp) * 20 + n_pairs;
    const auto tenths = static_cast<uint64_t>(scaled / (2 * static_cast<unsigned __int128>(n_pairs)));
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

SpReport sp_report(const Msa& msa, const RunConfig& run) {
    if (msa.size() < 2) throw Error(ErrorKind::TooFewSequences, "sum-of-pairs needs at least 2 rows");
    validate_msa(msa);
    const std::size_t n = msa.size();
    const auto per_row = par_map(
        n,
        [&](std::size_t i) {
            uint64_t s = 0;
            for (std::size_t j = i + 1; j < n; ++j) s += sp_pair(msa.rows[i].row, msa.rows[j].row);
            return s;
        },
        run, nullptr, "sp");
    SpReport r;
    for (uint64_t v : per_row) r.total_sp += v;
    r.n_pairs = static_cast<uint64_t>(n) * (n - 1) / 2;
    r.avg_sp = static_cast<double>(r.total_sp) / static_cast<double>(r.n_pairs);
    return r;
}

namespace {

using Partial = std::array<double, 4>;

int nucleotide_code(char c) {
    switch (c) {
        case 'A': return 0;
        case 'C': return 1;
        case 'G': return 2;
        case 'T':
        case 'U': return 3;
        default: return -1;
    }
}

}  // namespace

TreeScore jc69_loglik(const Msa& msa, const PhyloTree& tree) {
    if (msa.kind == AlphabetKind::Protein) {
        throw Error(ErrorKind::ProteinUnsupported, "JC69 likelihood needs nucleotide rows");
    }
    validate_msa(msa);

    const auto leaves = tree.leaf_ids();
    if (leaves.size() != msa.size()) {
        throw Error(ErrorKind::LeafMismatch, "tree has " + std::to_string(leaves.size()) + " leaves, alignment has " +
                                                 std::to_string(msa.size()) + " rows");
    }
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t r = 0; r < msa.size(); ++r) {
        if (!row_of.emplace(msa.rows[r].id, r).second) {
            throw Error(ErrorKind::LeafMismatch, "duplicate row id '" + msa.rows[r].id + "'");
        }
    }
    std::vector<long> leaf_row(tree.node_count(), -1);
    std::vector<bool> seen(msa.size(), false);
    for (int leaf : leaves) {
        const auto it = row_of.find(tree.node(leaf).label);
        if (it == row_of.end() || seen[it->second]) {
            throw Error(ErrorKind::LeafMismatch, "leaf '" + tree.node(leaf).label + "' has no matching row");
        }
        seen[it->second] = true;
        leaf_row[static_cast<std::size_t>(leaf)] = static_cast<long>(it->second);
    }

    // distinct column patterns with multiplicities, in first-seen order
    std::map<std::string, std::size_t> pattern_index;
    std::vector<std::string> patterns;
    std::vector<double> weight;
    for (std::size_t c = 0; c < msa.n_cols; ++c) {
        std::string col(msa.size(), '-');
        for (std::size_t r = 0; r < msa.size(); ++r) col[r] = msa.rows[r].row[c];
        const auto [it, fresh] = pattern_index.emplace(col, patterns.size());
        if (fresh) {
            patterns.push_back(col);
            weight.push_back(0.0);
        }
        weight[it->second] += 1.0;
    }

    // post-order from the first leaf's neighbour
    const int root = leaves.size() == 1 ? leaves[0] : tree.node(leaves[0]).links.at(0).neighbor;
    struct Visit {
        int id;
        int parent;
        double length;
    };
    std::vector<Visit> order;
    {
        std::vector<Visit> stack{{root, -1, 0.0}};
        while (!stack.empty()) {
            const Visit v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (const auto& l : tree.node(v.id).links) {
                if (l.neighbor != v.parent) stack.push_back({l.neighbor, v.id, l.length});
            }
        }
    }

    double total = 0.0;
    std::vector<Partial> partial(tree.node_count());
    std::vector<double> log_scale(tree.node_count());
    for (std::size_t p = 0; p < patterns.size(); ++p) {
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto id = static_cast<std::size_t>(it->id);
            Partial here{1.0, 1.0, 1.0, 1.0};
            double scale = 0.0;
            if (leaf_row[id] >= 0) {
                const int code = nucleotide_code(patterns[p][static_cast<std::size_t>(leaf_row[id])]);
                if (code >= 0) {
                    here = {0.0, 0.0, 0.0, 0.0};
                    here[static_cast<std::size_t>(code)] = 1.0;
                }
            }
            for (const auto& l : tree.node(it->id).links) {
                if (l.neighbor == it->parent) continue;
                const auto child = static_cast<std::size_t>(l.neighbor);
                const double e = std::exp(-4.0 * l.length / 3.0);
                const double same = 0.25 + 0.75 * e;
                const double diff = 0.25 - 0.25 * e;
                const Partial& cp = partial[child];
                const double sum = cp[0] + cp[1] + cp[2] + cp[3];
                for (std::size_t x = 0; x < 4; ++x) here[x] *= diff * sum + (same - diff) * cp[x];
                scale += log_scale[child];
            }
            const double peak = std::max(std::max(here[0], here[1]), std::max(here[2], here[3]));
            if (peak > 0.0 && peak < 1e-100) {
                for (double& v : here) v /= peak;
                scale += std::log(peak);
            }
            partial[id] = here;
            log_scale[id] = scale;
        }
        const auto r = static_cast<std::size_t>(root);
        const double site = 0.25 * (partial[r][0] + partial[r][1] + partial[r][2] + partial[r][3]);
        total += weight[p] * (std::log(site) + log_scale[r]);
    }
    return TreeScore{total};
}

}  // namespace cstar
