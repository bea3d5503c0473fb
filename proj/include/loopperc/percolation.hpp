#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "loopperc/links.hpp"
#include "loopperc/random.hpp"
#include "loopperc/tree.hpp"

namespace loopperc {

// Realisation of a site and/or bond percolation on a tree; both flag
// vectors are indexed by vertex id (an edge by its deeper endpoint).
struct PercolationMask {
    std::vector<char> removed_vertices;
    std::vector<char> retained_edges;

    bool removed(VertexId v) const { return removed_vertices[static_cast<std::size_t>(v)] != 0; }
};

struct PruningParams {
    double lambda = 1.0;
    double u = 1.0;
    int quadrature_nodes = 256;

    void validate() const;
};

// Connected component of the root in the retained-edge subgraph. `origin`,
// when given, receives the id in `tree` of every cluster vertex.
RootedTree link_cluster(const RootedTree& tree, const LinkConfiguration& config,
                        std::vector<VertexId>* origin = nullptr);

// Removal probability r_lambda(x) for a vertex with total degree d and
// D*(x) = d_star, by the one-dimensional reduction of the double integral.
double pruning_probability(std::size_t d, std::optional<std::size_t> d_star, const PruningParams& params);

// Same quantity from the two-dimensional integral over the unit square.
double pruning_probability_2d(std::size_t d, std::optional<std::size_t> d_star, const PruningParams& params);

struct McEstimate {
    double estimate;
    double std_error;
};

// Monte Carlo estimate of the pruning event probability from its
// construction: one link on the parent edge, two crosses (two bars when
// u = 0) on the pruning edge, and retained neighbouring edges avoiding
// their exposed intervals.
McEstimate verify_pruning_probability_mc(std::size_t d, std::size_t d_star, const PruningParams& params,
                                         std::size_t n, Rng& rng);

// Memoised pruning_probability for fixed params. Not thread safe.
class PruningTable {
public:
    explicit PruningTable(const PruningParams& params);

    const PruningParams& params() const { return params_; }
    double operator()(std::size_t d, std::optional<std::size_t> d_star);

private:
    PruningParams params_;
    std::map<std::pair<std::size_t, std::size_t>, double> cache_;
};

// Removes each x with |x| = 1 mod 3 independently with probability
// r_lambda(x) computed from its degree and D*(x) in `tree`.
PercolationMask delayed_pruning_mask(const RootedTree& tree, const PruningParams& params, Rng& rng);

// Whether the root reaches depth D through vertices not removed by `mask`.
bool survives_to_depth(const RootedTree& tree, const PercolationMask& mask, int depth);

// Component of the root after removing the masked vertices (and, when
// retained_edges is non-empty, the edges it does not retain).
RootedTree root_component(const RootedTree& tree, const PercolationMask& mask,
                          std::vector<VertexId>* origin = nullptr);

// Link cluster of the root, then delayed pruning on it; true iff the root
// still reaches depth D. Requires params.lambda == beta.
bool compose_link_delay_survival(const RootedTree& tree, double beta, const PruningParams& params, int depth,
                                 Rng& rng);
// Same, with the link configuration supplied; `rng` drives only the pruning.
bool compose_link_delay_survival(const RootedTree& tree, const LinkConfiguration& config,
                                 const PruningParams& params, int depth, Rng& rng);

// Whether edge e = {x, y} (y the child) seals T_y off from the loop of the
// root. The arc of x between the two links that holds x's entry points
// (times of links on x's parent edge, or time 0 when x is the root) must be
// free of links on the other child edges of x; y must have no child links
// on the complementary arc (crosses) or on that same arc (bars, u = 0).
bool is_pruning_edge(const RootedTree& tree, const LinkConfiguration& config, VertexId e);

// "d,d_star,lambda,u,r_quadrature,r_mc,mc_stderr" header. A NaN r_mc is
// written as NA in both Monte Carlo columns.
void write_pruning_header(std::ostream& out);
void write_pruning_row(std::ostream& out, std::size_t d, std::size_t d_star, const PruningParams& params,
                       double r_quadrature, double r_mc, double mc_stderr);

} // namespace loopperc
