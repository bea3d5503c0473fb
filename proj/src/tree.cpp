#include "loopperc/tree.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "loopperc/errors.hpp"

namespace loopperc {

RootedTree::RootedTree() : parent_{kNoVertex}, depth_{0}, first_child_{1, 1}, ids_{0} {}

RootedTree RootedTree::from_child_counts(std::span<const std::int64_t> counts) {
    RootedTree t;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i >= t.parent_.size())
            throw InvalidParameter("child counts list more vertices than the tree has");
        if (counts[i] < 0) throw InvalidParameter("negative child count");
        for (std::int64_t c = 0; c < counts[i]; ++c) {
            t.parent_.push_back(static_cast<VertexId>(i));
            t.depth_.push_back(t.depth_[i] + 1);
        }
    }
    const std::size_t n = t.parent_.size();
    // Breadth-first numbering: the children of v are the ids
    // [first_child_[v], first_child_[v+1]).
    t.first_child_.assign(n + 1, 0);
    VertexId next = 1;
    for (std::size_t v = 0; v < n; ++v) {
        t.first_child_[v] = next;
        if (v < counts.size()) next += static_cast<VertexId>(counts[v]);
    }
    t.first_child_[n] = next;
    t.ids_.resize(n);
    for (std::size_t v = 0; v < n; ++v) t.ids_[v] = static_cast<VertexId>(v);
    t.max_depth_ = t.depth_.back();
    return t;
}

RootedTree RootedTree::from_parents(std::span<const VertexId> parents, std::vector<VertexId>* relabel) {
    const std::size_t n = parents.size();
    if (n == 0) throw InvalidParameter("a tree needs at least one vertex");
    VertexId root = kNoVertex;
    std::vector<std::vector<VertexId>> kids(n);
    for (std::size_t v = 0; v < n; ++v) {
        const VertexId p = parents[v];
        if (p == kNoVertex) {
            if (root != kNoVertex) throw InvalidParameter("more than one root");
            root = static_cast<VertexId>(v);
        } else {
            if (p < 0 || static_cast<std::size_t>(p) >= n) throw InvalidParameter("parent id out of range");
            kids[static_cast<std::size_t>(p)].push_back(static_cast<VertexId>(v));
        }
    }
    if (root == kNoVertex) throw InvalidParameter("no root");
    std::vector<VertexId> order{root};
    std::vector<std::int64_t> counts;
    order.reserve(n);
    counts.reserve(n);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& ch = kids[static_cast<std::size_t>(order[i])];
        counts.push_back(static_cast<std::int64_t>(ch.size()));
        order.insert(order.end(), ch.begin(), ch.end());
    }
    if (order.size() != n) throw InvalidParameter("parent map contains a cycle or is disconnected");
    if (relabel) {
        relabel->assign(n, kNoVertex);
        for (std::size_t i = 0; i < n; ++i) (*relabel)[static_cast<std::size_t>(order[i])] = static_cast<VertexId>(i);
    }
    return from_child_counts(counts);
}

void RootedTree::check(VertexId v) const {
    if (!contains(v)) throw LookupError("vertex " + std::to_string(v) + " not in tree");
}

VertexId RootedTree::parent(VertexId v) const {
    check(v);
    return parent_[static_cast<std::size_t>(v)];
}

int RootedTree::depth(VertexId v) const {
    check(v);
    return depth_[static_cast<std::size_t>(v)];
}

std::span<const VertexId> RootedTree::children(VertexId v) const {
    check(v);
    const auto i = static_cast<std::size_t>(v);
    const auto b = static_cast<std::size_t>(first_child_[i]);
    const auto e = static_cast<std::size_t>(first_child_[i + 1]);
    return std::span<const VertexId>(ids_).subspan(b, e - b);
}

std::size_t RootedTree::child_count(VertexId v) const { return children(v).size(); }

std::size_t RootedTree::degree(VertexId v) const { return child_count(v) + (v == root() ? 0 : 1); }

std::vector<std::size_t> RootedTree::level_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(max_depth_) + 1, 0);
    for (int d : depth_) ++sizes[static_cast<std::size_t>(d)];
    return sizes;
}

RootedTree generate_regular(int d, int depth) {
    if (d < 2) throw InvalidParameter("regular tree needs d >= 2");
    if (depth < 0) throw InvalidParameter("depth must be >= 0");
    std::vector<std::int64_t> counts;
    std::size_t level = 1;
    for (int k = 0; k < depth; ++k) {
        const std::int64_t c = (k == 0) ? d : d - 1;
        counts.insert(counts.end(), level, c);
        level *= static_cast<std::size_t>(c);
    }
    return RootedTree::from_child_counts(counts);
}

RootedTree generate_galton_watson(const OffspringLaw& law, int depth, Rng& rng) {
    if (depth < 0) throw InvalidParameter("depth must be >= 0");
    std::vector<std::int64_t> counts;
    std::size_t level = 1;
    for (int k = 0; k < depth && level > 0; ++k) {
        std::size_t next = 0;
        for (std::size_t i = 0; i < level; ++i) {
            const std::int64_t c = law.sample(rng);
            counts.push_back(c);
            next += static_cast<std::size_t>(c);
        }
        level = next;
    }
    return RootedTree::from_child_counts(counts);
}

std::optional<std::size_t> d_star(const RootedTree& tree, VertexId x) {
    const auto kids = tree.children(x);
    if (kids.empty()) return std::nullopt;
    std::size_t best = tree.degree(kids.front());
    for (VertexId y : kids.subspan(1)) best = std::min(best, tree.degree(y));
    return best;
}

RootedTree truncate(const RootedTree& tree, int depth) {
    if (depth < 0) throw InvalidParameter("depth must be >= 0");
    std::vector<std::int64_t> counts;
    for (std::size_t v = 0; v < tree.size(); ++v) {
        const auto id = static_cast<VertexId>(v);
        if (tree.depth(id) >= depth) break;  // breadth-first: the rest are deeper
        counts.push_back(static_cast<std::int64_t>(tree.child_count(id)));
    }
    return RootedTree::from_child_counts(counts);
}

void write_tree_csv(std::ostream& out, const RootedTree& tree) {
    out << "id,parent_id,depth\n";
    for (std::size_t v = 0; v < tree.size(); ++v) {
        const auto id = static_cast<VertexId>(v);
        out << v << ',';
        if (id != tree.root()) out << tree.parent(id);
        out << ',' << tree.depth(id) << '\n';
    }
}

RootedTree read_tree_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "id,parent_id,depth")
        throw InvalidParameter("tree csv: missing header 'id,parent_id,depth'");
    std::vector<VertexId> parents;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw InvalidParameter("tree csv: malformed row " + std::to_string(row));
        const long id = std::stol(line.substr(0, c1));
        if (id != static_cast<long>(parents.size()))
            throw InvalidParameter("tree csv: ids must be 0..n-1 in order (row " + std::to_string(row) + ")");
        const auto p = line.substr(c1 + 1, c2 - c1 - 1);
        parents.push_back(p.empty() ? kNoVertex : static_cast<VertexId>(std::stol(p)));
    }
    return RootedTree::from_parents(parents);
}

} // namespace loopperc
