#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "loopperc/links.hpp"
#include "loopperc/offspring.hpp"
#include "loopperc/tree.hpp"
#include "loopperc/walk.hpp"

namespace loopperc {

// Which trees the estimators run on.
//   "regular:4"           root with 4 children, every other vertex 3
//   "gw:poisson:2"        Galton-Watson, fresh tree per replica
//   "gw-quenched:poisson:2"  Galton-Watson, one tree for all replicas
//   "file:path.csv"       explicit tree in the "id,parent_id,depth" format
class TreeSpec {
public:
    struct Regular { int d; };
    struct Law { OffspringLaw law; bool quenched; };
    struct Explicit { std::shared_ptr<const RootedTree> tree; std::string source; };

    static TreeSpec regular(int d);
    static TreeSpec galton_watson(OffspringLaw law, bool quenched = false);
    static TreeSpec explicit_tree(RootedTree tree, std::string source = "explicit");
    static TreeSpec parse(std::string_view text);
    std::string describe() const;

    const std::variant<Regular, Law, Explicit>& variant() const { return v_; }
    // Deepest level available; unbounded for generated trees.
    std::optional<int> max_depth() const;

private:
    explicit TreeSpec(std::variant<Regular, Law, Explicit> v) : v_(std::move(v)) {}
    std::variant<Regular, Law, Explicit> v_;
};

// One replica's tree and links, generated on demand below the root and cut
// at depth D. Every random quantity is a function of a key derived from the
// replica seed and the path from the root, so the world does not depend on
// the order of exploration. The links of an edge are the points of a
// rate-1 Poisson process in the intensity coordinate that fall below beta,
// each with a uniform time and a kind mark (cross with probability u);
// raising beta only adds links.
class LazyWorld {
public:
    // `tree_key` drives the offspring counts, `link_key` the links and any
    // per-vertex uniforms.
    LazyWorld(const TreeSpec& spec, std::uint64_t tree_key, std::uint64_t link_key, double beta, double u,
              int depth);

    VertexId root() const { return 0; }
    double beta() const { return beta_; }
    double u() const { return u_; }
    int cut_depth() const { return cut_; }

    int depth(VertexId v) const { return nodes_[idx(v)].depth; }
    VertexId parent(VertexId v) const { return nodes_[idx(v)].parent; }
    std::span<const VertexId> children(VertexId v);
    // Id of v in the explicit tree, or kNoVertex.
    VertexId explicit_id(VertexId v) const { return nodes_[idx(v)].explicit_id; }
    std::size_t size() const { return nodes_.size(); }

    // Whether e_c carries a link; cheaper than edge_links.
    bool retained(VertexId c) const;
    std::span<const Link> edge_links(VertexId c);
    // Uniform in [0,1) attached to vertex v for this replica.
    double vertex_uniform(VertexId v) const;

    // Walk source interface (see walk.hpp).
    std::span<const LinkEvent> events(VertexId v);
    VertexId other_end(VertexId v, const LinkEvent& e) const { return e.edge == v ? parent(v) : e.edge; }

private:
    struct Node {
        VertexId parent;
        int depth;
        std::uint64_t tree_key;
        std::uint64_t link_key;
        VertexId explicit_id;
        VertexId first_child = kNoVertex;
        std::int32_t child_count = -1;
        bool links_ready = false;
        bool events_ready = false;
        std::vector<Link> links;
        std::vector<LinkEvent> events;
    };

    static std::size_t idx(VertexId v) { return static_cast<std::size_t>(v); }
    std::int64_t offspring(const Node& n) const;

    const TreeSpec* spec_;
    double beta_;
    double u_;
    int cut_;
    std::vector<Node> nodes_;
    std::vector<VertexId> child_ids_;
};

} // namespace loopperc
