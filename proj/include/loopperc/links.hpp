#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "loopperc/random.hpp"
#include "loopperc/tree.hpp"

namespace loopperc {

enum class LinkKind : std::uint8_t { Cross, Bar };

const char* to_string(LinkKind kind);

// A point of the link process on one edge's time circle [0,1).
struct Link {
    double time;
    LinkKind kind;

    friend bool operator==(const Link&, const Link&) = default;
};

// Links on every edge of a tree, each edge's list strictly increasing in
// time. Edges are addressed by their deeper endpoint. Immutable.
class LinkConfiguration {
public:
    // No links anywhere.
    LinkConfiguration(std::size_t vertex_count, double beta, double u);

    // per_edge[x] holds the links of e_x; per_edge[0] (the root) must be
    // empty. Lists must be sorted and strictly increasing within [0,1).
    static LinkConfiguration from_edges(const std::vector<std::vector<Link>>& per_edge, double beta,
                                        double u);

    std::size_t vertex_count() const { return offsets_.size() - 1; }
    double beta() const { return beta_; }
    double u() const { return u_; }

    std::span<const Link> links(VertexId edge) const;
    std::size_t count(VertexId edge) const { return links(edge).size(); }
    std::size_t total() const { return links_.size(); }

    // Copy out as per-edge lists (the from_edges layout).
    std::vector<std::vector<Link>> per_edge() const;

private:
    friend LinkConfiguration sample_links(const RootedTree&, double, double, Rng&);

    LinkConfiguration() = default;

    std::vector<std::size_t> offsets_;  // links of e_x are [offsets_[x], offsets_[x+1])
    std::vector<Link> links_;
    double beta_ = 0.0;
    double u_ = 1.0;
};

// Independent Poisson(u*beta) crosses and Poisson((1-u)*beta) bars with
// uniform times on every edge. An edge whose sampled times collide is
// resampled as a whole.
LinkConfiguration sample_links(const RootedTree& tree, double beta, double u, Rng& rng);

// m_e >= 1.
bool is_retained(const LinkConfiguration& config, VertexId edge);

// "edge_child_id,time,kind" rows sorted by (edge, time).
void write_links_csv(std::ostream& out, const LinkConfiguration& config);

} // namespace loopperc
