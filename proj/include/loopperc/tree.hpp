#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loopperc/offspring.hpp"
#include "loopperc/random.hpp"

namespace loopperc {

using VertexId = std::int32_t;
inline constexpr VertexId kNoVertex = -1;

// Finite rooted tree with vertices numbered 0..n-1 in breadth-first order.
// The root is vertex 0. Children of a vertex are contiguous ids, so an
// edge is identified by its deeper endpoint (the edge e_x = {a(x), x}).
// Immutable once built.
class RootedTree {
public:
    // Isolated root.
    RootedTree();

    // Builds from a parent array (root marked with kNoVertex). Any labelling
    // is accepted; vertices are relabelled into breadth-first order, keeping
    // the relative order of siblings. `relabel`, when given, receives the new
    // id of each input vertex.
    static RootedTree from_parents(std::span<const VertexId> parents,
                                   std::vector<VertexId>* relabel = nullptr);

    // Builds from child counts listed in breadth-first order.
    static RootedTree from_child_counts(std::span<const std::int64_t> counts);

    std::size_t size() const { return parent_.size(); }
    std::size_t edge_count() const { return parent_.size() - 1; }
    VertexId root() const { return 0; }

    bool contains(VertexId v) const { return v >= 0 && static_cast<std::size_t>(v) < size(); }

    VertexId parent(VertexId v) const;
    int depth(VertexId v) const;
    std::span<const VertexId> children(VertexId v) const;
    std::size_t child_count(VertexId v) const;
    // Total degree deg_T(x): children plus the parent edge.
    std::size_t degree(VertexId v) const;

    int max_depth() const { return max_depth_; }
    // Number of vertices at each depth 0..max_depth.
    std::vector<std::size_t> level_sizes() const;

    // Raw per-vertex arrays, indexed by vertex id.
    std::span<const VertexId> parents() const { return parent_; }
    std::span<const int> depths() const { return depth_; }

private:
    void check(VertexId v) const;

    std::vector<VertexId> parent_;
    std::vector<int> depth_;
    std::vector<VertexId> first_child_;
    std::vector<VertexId> ids_;  // 0..n-1; children(v) is a slice of it
    int max_depth_ = 0;
};

// Root with d children, every other non-leaf vertex with d-1 children, all
// leaves at `depth`. Every non-leaf vertex has total degree d.
RootedTree generate_regular(int d, int depth);

// Each vertex above `depth` independently draws its number of children from
// `law`. The output depends only on (law, depth, rng state).
RootedTree generate_galton_watson(const OffspringLaw& law, int depth, Rng& rng);

// D*(x): minimum total degree among the children of x; empty for a leaf.
std::optional<std::size_t> d_star(const RootedTree& tree, VertexId x);

// Subtree induced by {x : |x| <= depth}.
RootedTree truncate(const RootedTree& tree, int depth);

// "id,parent_id,depth" rows, root first with an empty parent field.
void write_tree_csv(std::ostream& out, const RootedTree& tree);
RootedTree read_tree_csv(std::istream& in);

} // namespace loopperc
