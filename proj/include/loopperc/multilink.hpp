#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "loopperc/links.hpp"
#include "loopperc/loops.hpp"
#include "loopperc/offspring.hpp"
#include "loopperc/tree.hpp"

namespace loopperc {

// Maximal subtree below `root` whose edges all carry at least two links.
struct MultiLinkCluster {
    VertexId root;
    std::vector<VertexId> member_vertices;  // breadth-first from root
    std::vector<VertexId> member_edges;     // child endpoints

    bool contains(VertexId v) const;
};

MultiLinkCluster multi_link_cluster(const RootedTree& tree, const LinkConfiguration& config, VertexId x);

// Loop through (x, 0) using only the links on the cluster's edges.
LoopTrace multi_link_loop(const RootedTree& tree, const LinkConfiguration& config, VertexId x);

// Edges from a cluster vertex v to a child outside the cluster that carry
// exactly one link, at a time when `gamma` occupies v.
std::int64_t count_incident_unilinks(const RootedTree& tree, const LinkConfiguration& config,
                                     const LoopTrace& gamma, const MultiLinkCluster& cluster);

struct UnilinkReport {
    double mean_C1;
    double std_error;
    bool supercritical;  // mean_C1 - 3 std_error > 1
    double mean_gamma;   // mean |gamma_o|
    double gamma_std_error;
    // Mean and standard error of C1 - |gamma_o| beta e^-beta lambda; only
    // meaningful for Poisson(lambda) offspring (zero otherwise).
    double identity_gap;
    double identity_gap_std_error;
    std::size_t truncation_hits;  // replicas whose cluster reaches depth D
    std::size_t n;
};

// Monte Carlo over Galton-Watson trees truncated at depth D. Only the
// multi-link cluster of the root and the edges leaving it are generated;
// replica i uses replica_rng(seed, i).
UnilinkReport unilink_branching_criterion(const OffspringLaw& law, double beta, double u, int depth, std::size_t n,
                                          std::uint64_t seed, unsigned threads = 1);

// The local neighbourhood sampled for one replica: cluster vertices with
// their children and the links on every generated edge.
struct UnilinkSample {
    RootedTree tree;
    LinkConfiguration config;
};
UnilinkSample sample_unilink_neighbourhood(const OffspringLaw& law, double beta, double u, int depth, Rng& rng);

void write_unilink_header(std::ostream& out);
void write_unilink_row(std::ostream& out, const OffspringLaw& law, double beta, double u, int depth,
                       const UnilinkReport& report);

} // namespace loopperc
