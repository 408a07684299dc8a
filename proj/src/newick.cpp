#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cstar/error.hpp"
#include "cstar/phylo.hpp"

namespace cstar {

std::string format_length(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

constexpr std::string_view kMeta = " \t\r\n()[]':;,";

std::string quote_label(const std::string& label) {
    if (label.find_first_of(kMeta) == std::string::npos) return label;
    std::string out = "'";
    for (char c : label) {
        out += c;
        if (c == '\'') out += '\'';
    }
    out += '\'';
    return out;
}

class Writer {
public:
    explicit Writer(const PhyloTree& t) : t_(t), min_label_(t.node_count()) {}

    std::string run() {
        const auto leaves = t_.leaf_ids();
        if (leaves.empty()) return ";";
        if (leaves.size() == 1) return quote_label(t_.node(leaves[0]).label) + ";";
        const int first = *std::min_element(leaves.begin(), leaves.end(),
                                            [&](int a, int b) { return t_.node(a).label < t_.node(b).label; });
        const PhyloTree::Link anchor = t_.node(first).links.at(0);
        std::string out;
        if (t_.is_leaf(anchor.neighbor)) {
            // two directly connected leaves
            out = "(" + quote_label(t_.node(first).label) + ":0," + quote_label(t_.node(anchor.neighbor).label) + ":" +
                  format_length(anchor.length) + ");";
            return out;
        }
        compute_min(anchor.neighbor, -1);
        emit(anchor.neighbor, -1, 0.0, out);
        out += ';';
        return out;
    }

private:
    const std::string* compute_min(int id, int parent) {
        const std::string* best = t_.is_leaf(id) ? &t_.node(id).label : nullptr;
        for (const auto& l : t_.node(id).links) {
            if (l.neighbor == parent) continue;
            const std::string* m = compute_min(l.neighbor, id);
            if (best == nullptr || *m < *best) best = m;
        }
        min_label_[static_cast<std::size_t>(id)] = best;
        return best;
    }

    void emit(int id, int parent, double length, std::string& out) {
        const auto& node = t_.node(id);
        std::vector<PhyloTree::Link> kids;
        for (const auto& l : node.links) {
            if (l.neighbor != parent) kids.push_back(l);
        }
        if (!kids.empty()) {
            std::sort(kids.begin(), kids.end(), [&](const PhyloTree::Link& a, const PhyloTree::Link& b) {
                return *min_label_[static_cast<std::size_t>(a.neighbor)] <
                       *min_label_[static_cast<std::size_t>(b.neighbor)];
            });
            out += '(';
            for (std::size_t k = 0; k < kids.size(); ++k) {
                if (k > 0) out += ',';
                emit(kids[k].neighbor, id, kids[k].length, out);
            }
            out += ')';
        }
        if (!node.label.empty()) out += quote_label(node.label);
        if (parent >= 0) {
            out += ':';
            out += format_length(length);
        }
    }

    const PhyloTree& t_;
    std::vector<const std::string*> min_label_;
};

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    PhyloTree run() {
        skip();
        if (pos_ >= s_.size()) fail("empty tree");
        const int root = subtree();
        skip();
        if (pos_ >= s_.size() || s_[pos_] != ';') fail("expected ';'");
        ++pos_;
        skip();
        if (pos_ != s_.size()) fail("trailing text after ';'");
        (void)root;
        tree_.suppress_unary();
        return std::move(tree_);
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::MalformedTree, what + " at offset " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos_;
            } else if (c == '[') {
                const auto close = s_.find(']', pos_);
                if (close == std::string_view::npos) fail("unterminated comment");
                pos_ = close + 1;
            } else {
                break;
            }
        }
    }

    std::string label() {
        skip();
        std::string out;
        if (pos_ < s_.size() && s_[pos_] == '\'') {
            ++pos_;
            while (true) {
                if (pos_ >= s_.size()) fail("unterminated quoted label");
                if (s_[pos_] == '\'') {
                    if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '\'') {
                        out += '\'';
                        pos_ += 2;
                        continue;
                    }
                    ++pos_;
                    break;
                }
                out += s_[pos_++];
            }
            if (out.empty()) fail("empty quoted label");
            return out;
        }
        while (pos_ < s_.size() && kMeta.find(s_[pos_]) == std::string_view::npos) out += s_[pos_++];
        return out;
    }

    double length() {
        skip();
        if (pos_ >= s_.size() || s_[pos_] != ':') return 0.0;
        ++pos_;
        skip();
        double v = 0.0;
        const auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
        if (res.ec != std::errc()) fail("bad branch length");
        pos_ = static_cast<std::size_t>(res.ptr - s_.data());
        return v;
    }

    // returns the node id of the parsed subtree; its branch length is left in last_length_
    int subtree() {
        skip();
        int id = -1;
        if (pos_ < s_.size() && s_[pos_] == '(') {
            ++pos_;
            id = tree_.add_node();
            while (true) {
                const int child = subtree();
                tree_.add_edge(id, child, last_length_);
                skip();
                if (pos_ >= s_.size()) fail("unbalanced parentheses");
                if (s_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (s_[pos_] == ')') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ')'");
            }
            label();  // internal labels are not kept
        } else {
            std::string name = label();
            if (name.empty()) fail("missing leaf label");
            id = tree_.add_node(std::move(name));
        }
        last_length_ = length();
        return id;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    double last_length_ = 0.0;
    PhyloTree tree_;
};

}  // namespace

std::string write_newick(const PhyloTree& tree) { return Writer(tree).run(); }

void write_newick(const PhyloTree& tree, std::ostream& sink) { sink << write_newick(tree) << '\n'; }

void write_newick_file(const PhyloTree& tree, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "' for writing");
    write_newick(tree, out);
    out.flush();
    if (!out) throw Error(ErrorKind::IoFailure, "write to '" + path + "' failed");
}

PhyloTree parse_newick(std::string_view text) { return Parser(text).run(); }

}  // namespace cstar
