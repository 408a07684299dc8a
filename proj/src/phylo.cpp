#include "cstar/phylo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "cstar/error.hpp"
#include "cstar/kernels.hpp"

namespace cstar {

// ---------------------------------------------------------------- PhyloTree

int PhyloTree::add_node(std::string label) {
    nodes_.push_back({std::move(label), {}});
    return static_cast<int>(nodes_.size() - 1);
}

void PhyloTree::add_edge(int a, int b, double length) {
    nodes_.at(static_cast<std::size_t>(a)).links.push_back({b, length});
    nodes_.at(static_cast<std::size_t>(b)).links.push_back({a, length});
}

void PhyloTree::remove_edge(int a, int b) {
    auto drop = [](std::vector<Link>& links, int other) {
        links.erase(std::remove_if(links.begin(), links.end(), [other](const Link& l) { return l.neighbor == other; }),
                    links.end());
    };
    drop(nodes_.at(static_cast<std::size_t>(a)).links, b);
    drop(nodes_.at(static_cast<std::size_t>(b)).links, a);
}

void PhyloTree::suppress_unary() {
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        Node& n = nodes_[id];
        if (!n.label.empty() || n.links.size() != 2) continue;
        const Link x = n.links[0];
        const Link y = n.links[1];
        remove_edge(static_cast<int>(id), x.neighbor);
        remove_edge(static_cast<int>(id), y.neighbor);
        add_edge(x.neighbor, y.neighbor, x.length + y.length);
    }
}

std::vector<int> PhyloTree::leaf_ids() const {
    std::vector<int> out;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        if (!nodes_[id].label.empty()) out.push_back(static_cast<int>(id));
    }
    return out;
}

std::vector<std::string> PhyloTree::leaf_labels() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_) {
        if (!n.label.empty()) out.push_back(n.label);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int PhyloTree::find_leaf(std::string_view label) const {
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        if (nodes_[id].label == label) return static_cast<int>(id);
    }
    return -1;
}

double PhyloTree::edge_length(int a, int b) const {
    for (const auto& l : node(a).links) {
        if (l.neighbor == b) return l.length;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<int> PhyloTree::live_nodes() const {
    std::vector<int> out;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        if (!nodes_[id].label.empty() || !nodes_[id].links.empty()) out.push_back(static_cast<int>(id));
    }
    return out;
}

std::vector<std::pair<std::set<std::string>, double>> PhyloTree::splits() const {
    std::vector<std::pair<std::set<std::string>, double>> out;
    const auto leaves = leaf_ids();
    if (leaves.size() < 2) return out;
    const int root = *std::min_element(leaves.begin(), leaves.end(),
                                       [&](int a, int b) { return node(a).label < node(b).label; });

    // iterative post-order from the smallest leaf
    struct Frame {
        int id;
        int parent;
        double length;
        std::size_t next = 0;
        std::set<std::string> below;
    };
    std::vector<Frame> stack;
    stack.push_back({root, -1, 0.0, 0, {}});
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& links = node(f.id).links;
        if (f.next < links.size()) {
            const Link l = links[f.next++];
            if (l.neighbor != f.parent) stack.push_back({l.neighbor, f.id, l.length, 0, {}});
            continue;
        }
        if (!node(f.id).label.empty() && f.id != root) f.below.insert(node(f.id).label);
        Frame done = std::move(stack.back());
        stack.pop_back();
        if (done.parent < 0) break;
        out.emplace_back(done.below, done.length);
        stack.back().below.insert(done.below.begin(), done.below.end());
    }
    return out;
}

// ---------------------------------------------------------------- distances

namespace {

double pair_distance(std::string_view a, std::string_view b, bool* incomparable) {
    const kernels::PairCounts c = kernels::pair_counts(a, b);
    if (c.comparable == 0) {
        if (incomparable != nullptr) *incomparable = true;
        return 1.0;
    }
    return static_cast<double>(c.mismatches) / static_cast<double>(c.comparable);
}

DistMatrix distances_among(const Msa& msa, const std::vector<std::size_t>& rows, const RunConfig& run) {
    DistMatrix dm;
    dm.n = rows.size();
    dm.d.assign(dm.n * dm.n, 0.0);
    for (std::size_t r : rows) dm.labels.push_back(msa.rows[r].id);
    struct RowOut {
        std::vector<double> values;
        std::size_t incomparable = 0;
    };
    auto row_fn = [&](std::size_t i) {
        RowOut out;
        out.values.resize(dm.n - i - 1);
        for (std::size_t j = i + 1; j < dm.n; ++j) {
            bool flag = false;
            out.values[j - i - 1] = pair_distance(msa.rows[rows[i]].row, msa.rows[rows[j]].row, &flag);
            out.incomparable += flag ? 1 : 0;
        }
        return out;
    };
    const auto computed = par_map(dm.n, row_fn, run, nullptr, "distance");
    for (std::size_t i = 0; i < dm.n; ++i) {
        for (std::size_t j = i + 1; j < dm.n; ++j) {
            dm(i, j) = dm(j, i) = computed[i].values[j - i - 1];
        }
        dm.incomparable_pairs += computed[i].incomparable;
    }
    return dm;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

}  // namespace

DistMatrix p_distance(const Msa& msa, const RunConfig& run) {
    if (msa.size() < 3) throw Error(ErrorKind::TooFewSequences, "distance matrix needs at least 3 rows");
    validate_msa(msa);
    return distances_among(msa, all_rows(msa.size()), run);
}

// ------------------------------------------------------------ neighbor join

PhyloTree nj_build(const DistMatrix& dm, std::vector<NjStep>* trace) {
    const std::size_t n = dm.n;
    if (n < 3) throw Error(ErrorKind::TooFewSequences, "neighbor joining needs at least 3 taxa");
    for (double v : dm.d) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteDistance, "distance matrix has a non-finite entry");
    }

    PhyloTree tree;
    std::vector<int> node_of(n);
    for (std::size_t i = 0; i < n; ++i) node_of[i] = tree.add_node(dm.labels.at(i));
    std::vector<double> d = dm.d;
    std::vector<bool> alive(n, true);
    std::vector<double> r_sum(n, 0.0);
    std::size_t remaining = n;

    auto at = [&](std::size_t i, std::size_t j) -> double& { return d[i * n + j]; };

    while (remaining > 2) {
        std::vector<std::size_t> slots;
        for (std::size_t i = 0; i < n; ++i) {
            if (alive[i]) slots.push_back(i);
        }
        for (std::size_t i : slots) {
            double s = 0.0;
            for (std::size_t k : slots) s += at(i, k);
            r_sum[i] = s;
        }
        const double scale = static_cast<double>(remaining - 2);
        std::size_t bi = slots[0], bj = slots[1];
        std::size_t pi = 0, pj = 1;
        double best_q = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < slots.size(); ++a) {
            for (std::size_t b = a + 1; b < slots.size(); ++b) {
                const std::size_t i = slots[a], j = slots[b];
                const double q = scale * at(i, j) - r_sum[i] - r_sum[j];
                if (q < best_q) {
                    best_q = q;
                    bi = i;
                    bj = j;
                    pi = a;
                    pj = b;
                }
            }
        }
        if (trace != nullptr) {
            NjStep step;
            for (std::size_t i : slots) {
                const auto& lbl = tree.node(node_of[i]).label;
                step.active.push_back(lbl.empty() ? "#" + std::to_string(node_of[i]) : lbl);
                std::vector<double> row;
                for (std::size_t k : slots) row.push_back(at(i, k));
                step.dist.push_back(std::move(row));
            }
            step.first = pi;
            step.second = pj;
            trace->push_back(std::move(step));
        }

        const double dij = at(bi, bj);
        double li = 0.5 * dij + (r_sum[bi] - r_sum[bj]) / (2.0 * scale);
        double lj = dij - li;
        if (li < 0.0) {
            lj += li;
            li = 0.0;
        } else if (lj < 0.0) {
            li += lj;
            lj = 0.0;
        }
        const int u = tree.add_node();
        tree.add_edge(u, node_of[bi], li);
        tree.add_edge(u, node_of[bj], lj);
        for (std::size_t k : slots) {
            if (k == bi || k == bj) continue;
            const double duk = 0.5 * (at(bi, k) + at(bj, k) - dij);
            at(bi, k) = duk;
            at(k, bi) = duk;
        }
        at(bi, bi) = 0.0;
        alive[bj] = false;
        node_of[bi] = u;
        --remaining;
    }

    std::size_t a = n, b = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        (a == n ? a : b) = i;
    }
    tree.add_edge(node_of[a], node_of[b], std::max(0.0, at(a, b)));
    return tree;
}

// ---------------------------------------------------------------- clustering

std::vector<std::size_t> seeded_sample(std::size_t n, std::size_t count, uint64_t seed) {
    count = std::min(count, n);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx = all_rows(n);
    for (std::size_t i = 0; i < count; ++i) {
        const uint64_t range = n - i;
        const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % range;
        uint64_t x = 0;
        do {
            x = rng();
        } while (x >= limit);
        std::swap(idx[i], idx[i + static_cast<std::size_t>(x % range)]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

class RowDistance {
public:
    explicit RowDistance(const Msa& msa) : msa_(msa) {}
    double operator()(std::size_t a, std::size_t b) const {
        if (a == b) return 0.0;
        return pair_distance(msa_.rows[a].row, msa_.rows[b].row, nullptr);
    }

private:
    const Msa& msa_;
};

std::size_t medoid_of(const std::vector<std::size_t>& members, const RowDistance& dist) {
    std::size_t best = members.front();
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t m : members) {
        double s = 0.0;
        for (std::size_t o : members) s += dist(m, o);
        if (s < best_sum) {
            best_sum = s;
            best = m;
        }
    }
    return best;
}

// complete-linkage agglomeration of `rows` down to `target` groups
std::vector<std::vector<std::size_t>> complete_linkage(const std::vector<std::size_t>& rows, std::size_t target,
                                                       const RowDistance& dist) {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t r : rows) groups.push_back({r});
    const std::size_t s = rows.size();
    std::vector<double> link(s * s, 0.0);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i + 1; j < s; ++j) link[i * s + j] = link[j * s + i] = dist(rows[i], rows[j]);
    std::vector<bool> alive(s, true);
    std::size_t count = s;
    while (count > target) {
        std::size_t ba = 0, bb = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < s; ++a) {
            if (!alive[a]) continue;
            for (std::size_t b = a + 1; b < s; ++b) {
                if (alive[b] && link[a * s + b] < best) {
                    best = link[a * s + b];
                    ba = a;
                    bb = b;
                }
            }
        }
        for (std::size_t k = 0; k < s; ++k) {
            if (!alive[k] || k == ba || k == bb) continue;
            const double v = std::max(link[ba * s + k], link[bb * s + k]);
            link[ba * s + k] = link[k * s + ba] = v;
        }
        groups[ba].insert(groups[ba].end(), groups[bb].begin(), groups[bb].end());
        groups[bb].clear();
        alive[bb] = false;
        --count;
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t a = 0; a < s; ++a) {
        if (alive[a]) {
            std::sort(groups[a].begin(), groups[a].end());
            out.push_back(std::move(groups[a]));
        }
    }
    return out;
}

std::size_t ceil_sqrt(std::size_t n) {
    auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (r * r < n) ++r;
    while (r > 0 && (r - 1) * (r - 1) >= n) --r;
    return r;
}

}  // namespace

ClusterPlan cluster_sequences(const Msa& msa, const ClusterConfig& cfg, const RunConfig& run) {
    const std::size_t n = msa.size();
    ClusterPlan plan;
    const RowDistance dist(msa);
    if (n == 0) return plan;
    if (n < 10) {
        plan.assignments.assign(n, 0);
        plan.medoids = {medoid_of(all_rows(n), dist)};
        plan.sizes = {n};
        return plan;
    }

    const auto sample_size = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(cfg.sample_frac * static_cast<double>(n))), 1, n);
    const std::vector<std::size_t> sample = seeded_sample(n, sample_size, cfg.seed);
    const auto groups = complete_linkage(sample, ceil_sqrt(sample.size()), dist);

    std::vector<std::size_t> medoids;
    for (const auto& g : groups) medoids.push_back(medoid_of(g, dist));
    std::sort(medoids.begin(), medoids.end());
    medoids.erase(std::unique(medoids.begin(), medoids.end()), medoids.end());

    // label every row with its nearest medoid; a medoid keeps its own group
    auto nearest = [&](std::size_t row, const std::vector<std::size_t>& among, std::size_t skip) {
        std::size_t best = among.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < among.size(); ++c) {
            if (c == skip) continue;
            const double v = dist(row, among[c]);
            if (v < best_d) {
                best_d = v;
                best = c;
            }
        }
        return best;
    };
    std::vector<std::size_t> assign = par_map(
        n,
        [&](std::size_t row) {
            const auto own = std::find(medoids.begin(), medoids.end(), row);
            if (own != medoids.end()) return static_cast<std::size_t>(own - medoids.begin());
            return nearest(row, medoids, medoids.size());
        },
        run, nullptr, "cluster_assign");

    std::vector<std::vector<std::size_t>> members(medoids.size());
    for (std::size_t row = 0; row < n; ++row) members[assign[row]].push_back(row);

    // fold clusters under 2 rows into the nearest other medoid
    for (std::size_t c = 0; c < members.size() && members.size() > 1;) {
        if (members[c].size() >= 2) {
            ++c;
            continue;
        }
        std::vector<std::size_t> others;
        std::vector<std::size_t> other_idx;
        for (std::size_t o = 0; o < medoids.size(); ++o) {
            if (o != c) {
                others.push_back(medoids[o]);
                other_idx.push_back(o);
            }
        }
        const std::size_t target = other_idx[nearest(medoids[c], others, others.size())];
        members[target].insert(members[target].end(), members[c].begin(), members[c].end());
        std::sort(members[target].begin(), members[target].end());
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(c));
        medoids.erase(medoids.begin() + static_cast<std::ptrdiff_t>(c));
    }

    // split clusters over the cap around their medoid and its farthest member
    const auto cap = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.balance_cap * static_cast<double>(n) - 1e-9)));
    for (std::size_t c = 0; c < members.size();) {
        if (members[c].size() <= cap) {
            ++c;
            continue;
        }
        const std::size_t m1 = medoids[c];
        std::size_t m2 = m1;
        double far = -1.0;
        for (std::size_t r : members[c]) {
            const double v = dist(m1, r);
            if (v > far) {
                far = v;
                m2 = r;
            }
        }
        std::vector<std::size_t> part_a, part_b;
        if (far <= 0.0) {
            // indistinguishable rows: split by position, medoid first
            part_a.push_back(m1);
            const std::size_t half = (members[c].size() + 1) / 2;
            for (std::size_t r : members[c]) {
                if (r == m1) continue;
                (part_a.size() < half ? part_a : part_b).push_back(r);
            }
            m2 = part_b.front();
        } else {
            for (std::size_t r : members[c]) (dist(r, m2) < dist(r, m1) ? part_b : part_a).push_back(r);
        }
        std::sort(part_a.begin(), part_a.end());
        std::sort(part_b.begin(), part_b.end());
        members[c] = std::move(part_a);
        members.push_back(std::move(part_b));
        medoids.push_back(m2);
    }

    // canonical order: by medoid row
    std::vector<std::size_t> order(medoids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return medoids[a] < medoids[b]; });
    plan.assignments.assign(n, 0);
    for (std::size_t k = 0; k < order.size(); ++k) {
        plan.medoids.push_back(medoids[order[k]]);
        plan.sizes.push_back(members[order[k]].size());
        for (std::size_t r : members[order[k]]) plan.assignments[r] = k;
    }
    return plan;
}

// ------------------------------------------------------------- build_tree

namespace {

// tree over `rows`; node id i is the leaf for rows[i]
PhyloTree cluster_tree(const Msa& msa, const std::vector<std::size_t>& rows) {
    if (rows.size() >= 3) return nj_build(distances_among(msa, rows, RunConfig{1, 0, 0}));
    PhyloTree t;
    for (std::size_t r : rows) t.add_node(msa.rows[r].id);
    if (rows.size() == 2) {
        const double d = pair_distance(msa.rows[rows[0]].row, msa.rows[rows[1]].row, nullptr);
        const int mid = t.add_node();
        t.add_edge(mid, 0, d / 2.0);
        t.add_edge(mid, 1, d / 2.0);
    }
    return t;
}

// copies `src` into `dst`; returns the id mapping
std::vector<int> copy_into(PhyloTree& dst, const PhyloTree& src) {
    std::vector<int> map(src.node_count());
    for (std::size_t id = 0; id < src.node_count(); ++id) map[id] = dst.add_node(src.node(static_cast<int>(id)).label);
    for (std::size_t id = 0; id < src.node_count(); ++id) {
        for (const auto& l : src.node(static_cast<int>(id)).links) {
            if (static_cast<int>(id) < l.neighbor) dst.add_edge(map[id], map[static_cast<std::size_t>(l.neighbor)], l.length);
        }
    }
    return map;
}

}  // namespace

PhyloTree build_tree(const Msa& msa, const TreeConfig& cfg, RunReport* report) {
    const std::size_t n = msa.size();
    if (n < 3) throw Error(ErrorKind::TooFewSequences, "tree building needs at least 3 rows");
    validate_msa(msa);

    if (!cfg.force_cluster && n <= cfg.direct_threshold) {
        StageTimer timer(report, "nj");
        PhyloTree t = nj_build(p_distance(msa, cfg.run));
        timer.finish(n, 1, 1);
        return t;
    }

    ClusterPlan plan;
    {
        StageTimer timer(report, "cluster");
        plan = cluster_sequences(msa, cfg.cluster, cfg.run);
        timer.finish(n, plan.cluster_count(), cfg.run.resolved_threads());
    }
    std::vector<std::vector<std::size_t>> members(plan.cluster_count());
    for (std::size_t r = 0; r < n; ++r) members[plan.assignments[r]].push_back(r);

    const std::vector<PhyloTree> subtrees =
        par_map(members.size(), [&](std::size_t c) { return cluster_tree(msa, members[c]); }, cfg.run, report,
                "cluster_nj");

    PhyloTree merged;
    if (members.size() == 1) {
        merged = subtrees.front();
    } else {
        const PhyloTree skeleton = cluster_tree(msa, plan.medoids);
        copy_into(merged, skeleton);  // skeleton node i is medoid i's leaf
        for (std::size_t c = 0; c < members.size(); ++c) {
            if (members[c].size() == 1) continue;
            const int sk_leaf = static_cast<int>(c);
            const PhyloTree::Link sk_link = merged.node(sk_leaf).links.front();
            const auto map = copy_into(merged, subtrees[c]);
            const auto pos = static_cast<std::size_t>(
                std::find(members[c].begin(), members[c].end(), plan.medoids[c]) - members[c].begin());
            const int m = map[pos];
            const PhyloTree::Link m_link = merged.node(m).links.front();

            // the medoid's skeleton branch is re-attached inside its cluster
            // tree, on the medoid's pendant edge, keeping both path lengths
            merged.remove_edge(sk_leaf, sk_link.neighbor);
            merged.remove_edge(m, m_link.neighbor);
            const double along = std::min(sk_link.length, m_link.length);
            const int q = merged.add_node();
            merged.add_edge(q, m, along);
            merged.add_edge(q, m_link.neighbor, m_link.length - along);
            merged.add_edge(q, sk_link.neighbor, sk_link.length - along);
        }
        // skeleton leaves that were replaced still hold their labels
        PhyloTree cleaned;
        std::vector<int> map(merged.node_count(), -1);
        for (std::size_t id = 0; id < merged.node_count(); ++id) {
            const auto& node = merged.node(static_cast<int>(id));
            if (node.links.empty()) continue;
            map[id] = cleaned.add_node(node.label);
        }
        for (std::size_t id = 0; id < merged.node_count(); ++id) {
            for (const auto& l : merged.node(static_cast<int>(id)).links) {
                if (static_cast<int>(id) < l.neighbor) {
                    cleaned.add_edge(map[id], map[static_cast<std::size_t>(l.neighbor)], l.length);
                }
            }
        }
        merged = std::move(cleaned);
    }
    merged.suppress_unary();

    if (report != nullptr) {
        report->extra.emplace_back("clusters", std::to_string(plan.cluster_count()));
        std::size_t largest = 0;
        for (std::size_t s : plan.sizes) largest = std::max(largest, s);
        report->extra.emplace_back("largest_cluster", std::to_string(largest));
        if (n <= 2000) {
            const PhyloTree direct = nj_build(p_distance(msa, cfg.run));
            report->extra.emplace_back("rf_vs_direct", std::to_string(robinson_foulds(merged, direct)));
        }
    }
    return merged;
}

std::size_t robinson_foulds(const PhyloTree& a, const PhyloTree& b) {
    auto nontrivial = [](const PhyloTree& t) {
        const std::size_t leaves = t.leaf_labels().size();
        std::set<std::set<std::string>> out;
        for (auto& [side, len] : t.splits()) {
            if (side.size() >= 2 && side.size() + 2 <= leaves) out.insert(side);
        }
        return out;
    };
    const auto sa = nontrivial(a);
    const auto sb = nontrivial(b);
    std::size_t diff = 0;
    for (const auto& s : sa) diff += sb.count(s) == 0 ? 1 : 0;
    for (const auto& s : sb) diff += sa.count(s) == 0 ? 1 : 0;
    return diff;
}

}  // namespace cstar
