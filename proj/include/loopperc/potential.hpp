#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "loopperc/random.hpp"
#include "loopperc/tree.hpp"

namespace loopperc {

// Vertex function with g(o) = 1, non-decreasing away from the root.
class Gauge {
public:
    // values[v] for every vertex of `tree`.
    static Gauge from_values(const RootedTree& tree, std::vector<double> values);
    // g(x) = q^-|x|.
    static Gauge exponential(const RootedTree& tree, double q);

    double value(VertexId v) const { return values_[static_cast<std::size_t>(v)]; }
    // g(x) - g(a(x)); zero at the root.
    double increment(VertexId v) const { return increments_[static_cast<std::size_t>(v)]; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
    std::vector<double> increments_;
};

// g_p(x) = prod over the edges from the root to x of 1/p(e); p is indexed by
// the child endpoint of each edge (p[0] unused).
Gauge gauge_from_percolation(const RootedTree& tree, std::span<const double> p);
Gauge gauge_from_percolation(const RootedTree& tree, double p);

// Conductance between the root and the shorted set of depth-D vertices,
// edge e_x having conductance 1/increment(x). +infinity when a path of
// zero increments reaches depth D.
double effective_conductance(const RootedTree& tree, const Gauge& gauge, int depth);

struct BranchingOptions {
    double q_tolerance = 1e-3;
    // Decay iff the fitted slope of log(R_k - R_{k-1}) is >= -delta.
    double delta = 0.0;
    int scan_points = 32;
};

struct BranchingEstimate {
    double br;
    double q_hat;
    int depth;
    int first_fit_depth;  // fit window is [first_fit_depth, depth]
    double delta;
};

// Slope of log(R_k - R_{k-1}) over the deepest half of depths 1..D for the
// exponential gauge q^-|x|, with R_k the root-to-depth-k resistance.
// +infinity when the increments vanish to rounding (resistance converged).
double resistance_increment_slope(const RootedTree& tree, double q, int depth);

// Boundary 1/q_hat between decaying and stabilising C_D(q). Throws
// NonMonotone if the scan over q is not a single switch.
BranchingEstimate branching_number_estimate(const RootedTree& tree, int depth, const BranchingOptions& options = {});

struct ProbeResult {
    double br_before;
    double br_after_mean;
    double std_error;
    std::size_t components;
    std::size_t attempts;
};

// br of `tree` and the mean br over N root components drawn by `component`.
// Components not reaching depth D are redrawn; DegenerateSample when none
// does within 20 N draws.
ProbeResult percolation_probe(const RootedTree& tree, int depth, std::size_t n,
                              const std::function<RootedTree(std::size_t)>& component,
                              const BranchingOptions& options = {});

// Components of delay_lambda o link_lambda percolation. Component i uses the
// stream replica_rng(seed, i), so results do not depend on scheduling.
ProbeResult theorem53_probe(const RootedTree& tree, double lambda, double u, int depth, std::size_t n,
                            std::uint64_t seed, const BranchingOptions& options = {});

void write_conductance_csv(std::ostream& out, std::span<const double> qs, std::span<const int> depths,
                           const RootedTree& tree);

} // namespace loopperc
