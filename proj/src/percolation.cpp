#include "loopperc/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "loopperc/errors.hpp"
#include "loopperc/quadrature.hpp"

namespace loopperc {

void PruningParams::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidParameter("pruning lambda must be finite and > 0");
    if (!(u >= 0.0 && u <= 1.0)) throw InvalidParameter("pruning u must lie in [0,1]");
    if (quadrature_nodes < 64) throw InvalidParameter("quadrature_nodes must be >= 64");
}

RootedTree link_cluster(const RootedTree& tree, const LinkConfiguration& config, std::vector<VertexId>* origin) {
    if (tree.size() != config.vertex_count())
        throw InvalidParameter("link configuration does not match the tree");
    std::vector<VertexId> order{tree.root()};
    std::vector<std::int64_t> counts;
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::int64_t k = 0;
        for (VertexId c : tree.children(order[i])) {
            if (config.count(c) == 0) continue;
            order.push_back(c);
            ++k;
        }
        counts.push_back(k);
    }
    if (origin) *origin = order;
    return RootedTree::from_child_counts(counts);
}

namespace {

// Integrand pieces of the pruning probability. A(l) is the probability that
// a retained Poisson(lambda) edge has all its links inside a set of
// measure l.
struct PruningIntegrand {
    double lambda;
    bool bars;
    int child_exp;
    int sibling_exp;
    double norm;

    PruningIntegrand(std::size_t d, std::size_t d_star, const PruningParams& p)
        : lambda(p.lambda), bars(p.u == 0.0), norm(-std::expm1(-p.lambda)) {
        if (bars) {
            child_exp = static_cast<int>(d + d_star) - 3;
            sibling_exp = 0;
        } else {
            child_exp = static_cast<int>(d_star) - 1;
            sibling_exp = static_cast<int>(d) - 2;
        }
    }

    double A(double l) const { return std::exp(-lambda) * std::expm1(lambda * l) / norm; }

    double operator()(double w) const {
        if (bars) return std::pow(A(1.0 - w), child_exp);
        return std::pow(A(1.0 - w), child_exp) * std::pow(A(w), sibling_exp);
    }
};

double prefactor(const PruningParams& p) {
    const double l = p.lambda;
    const double q = -std::expm1(-l);
    const double base = l * l * l * std::exp(-2.0 * l) / (2.0 * q * q);
    return p.u == 0.0 ? base : p.u * p.u * base;
}

bool vacuous(std::size_t d, std::optional<std::size_t> d_star) { return d < 2 || !d_star || *d_star < 1; }

} // namespace

double pruning_probability(std::size_t d, std::optional<std::size_t> d_star, const PruningParams& params) {
    params.validate();
    if (vacuous(d, d_star)) return 0.0;
    const PruningIntegrand f(d, *d_star, params);
    const auto& rule = gauss_legendre_unit(params.quadrature_nodes);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double w = rule.nodes[i];
        sum += rule.weights[i] * (1.0 - w) * f(w);
    }
    return prefactor(params) * 2.0 * sum;
}

double pruning_probability_2d(std::size_t d, std::optional<std::size_t> d_star, const PruningParams& params) {
    params.validate();
    if (vacuous(d, d_star)) return 0.0;
    const PruningIntegrand f(d, *d_star, params);
    const auto& rule = gauss_legendre_unit(params.quadrature_nodes);
    // Each half of the square {t < s} and {s < t} is mapped onto the unit
    // square by t = s xi (resp. s = t xi); both halves give the same sum.
    double half = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = rule.nodes[i];
        double inner = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) inner += rule.weights[j] * f(s * (1.0 - rule.nodes[j]));
        half += rule.weights[i] * s * inner;
    }
    return prefactor(params) * 2.0 * half;
}

namespace {

std::int64_t poisson(double mean, Rng& rng) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::int64_t>(mean)(rng);
}

// Poisson(lambda) conditioned on being >= 1.
std::int64_t poisson_positive(double lambda, Rng& rng) {
    std::poisson_distribution<std::int64_t> dist(lambda);
    for (;;) {
        const auto k = dist(rng);
        if (k >= 1) return k;
    }
}

// Whether a retained edge's links all avoid the open interval (lo, hi),
// or its complement when `outside` is set.
bool retained_edge_avoids(double lambda, double lo, double hi, bool outside, Rng& rng) {
    const auto k = poisson_positive(lambda, rng);
    bool ok = true;
    for (std::int64_t i = 0; i < k; ++i) {
        const double t = uniform01(rng);
        const bool inside = lo < t && t < hi;
        if (inside != outside) ok = false;
    }
    return ok;
}

} // namespace

McEstimate verify_pruning_probability_mc(std::size_t d, std::size_t d_star, const PruningParams& params,
                                         std::size_t n, Rng& rng) {
    params.validate();
    if (d < 2 || d_star < 1) throw InvalidParameter("Monte Carlo pruning check needs d >= 2 and d_star >= 1");
    if (n < 1000) throw InvalidParameter("Monte Carlo pruning check needs N >= 1000");
    const double lambda = params.lambda;
    const bool bars = params.u == 0.0;
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const bool single_parent_link = poisson_positive(lambda, rng) == 1;
        std::int64_t crosses = 0, nbars = 0;
        do {
            crosses = poisson(params.u * lambda, rng);
            nbars = poisson((1.0 - params.u) * lambda, rng);
        } while (crosses + nbars == 0);
        const double u1 = uniform01(rng), u2 = uniform01(rng);
        const bool two_links = bars ? (nbars == 2 && crosses == 0) : (crosses == 2 && nbars == 0);
        const double lo = std::min(u1, u2), hi = std::max(u1, u2);
        bool ok = single_parent_link && two_links;
        if (bars) {
            for (std::size_t i = 0; i + 3 < d + d_star; ++i) ok &= retained_edge_avoids(lambda, lo, hi, false, rng);
        } else {
            for (std::size_t i = 0; i + 1 < d_star; ++i) ok &= retained_edge_avoids(lambda, lo, hi, false, rng);
            for (std::size_t i = 0; i + 2 < d; ++i) ok &= retained_edge_avoids(lambda, lo, hi, true, rng);
        }
        hits += ok;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

PruningTable::PruningTable(const PruningParams& params) : params_(params) { params_.validate(); }

double PruningTable::operator()(std::size_t d, std::optional<std::size_t> d_star) {
    if (vacuous(d, d_star)) return 0.0;
    const auto key = std::make_pair(d, *d_star);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double r = pruning_probability(d, d_star, params_);
    cache_.emplace(key, r);
    return r;
}

PercolationMask delayed_pruning_mask(const RootedTree& tree, const PruningParams& params, Rng& rng) {
    PruningTable table(params);
    PercolationMask mask;
    mask.removed_vertices.assign(tree.size(), 0);
    mask.retained_edges.assign(tree.size(), 1);
    mask.retained_edges[0] = 0;
    for (std::size_t x = 1; x < tree.size(); ++x) {
        const auto v = static_cast<VertexId>(x);
        if (tree.depth(v) % 3 != 1) continue;
        const double r = table(tree.degree(v), d_star(tree, v));
        if (uniform01(rng) < r) mask.removed_vertices[x] = 1;
    }
    return mask;
}

bool survives_to_depth(const RootedTree& tree, const PercolationMask& mask, int depth) {
    if (depth <= 0) return true;
    std::vector<VertexId> stack{tree.root()};
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        if (tree.depth(v) >= depth) return true;
        for (VertexId c : tree.children(v)) {
            const auto i = static_cast<std::size_t>(c);
            if (mask.removed_vertices[i]) continue;
            if (!mask.retained_edges.empty() && !mask.retained_edges[i]) continue;
            stack.push_back(c);
        }
    }
    return false;
}

RootedTree root_component(const RootedTree& tree, const PercolationMask& mask, std::vector<VertexId>* origin) {
    std::vector<VertexId> order{tree.root()};
    std::vector<std::int64_t> counts;
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::int64_t k = 0;
        for (VertexId c : tree.children(order[i])) {
            const auto j = static_cast<std::size_t>(c);
            if (mask.removed_vertices[j]) continue;
            if (!mask.retained_edges.empty() && !mask.retained_edges[j]) continue;
            order.push_back(c);
            ++k;
        }
        counts.push_back(k);
    }
    if (origin) *origin = order;
    return RootedTree::from_child_counts(counts);
}

bool compose_link_delay_survival(const RootedTree& tree, const LinkConfiguration& config,
                                 const PruningParams& params, int depth, Rng& rng) {
    const auto cluster = link_cluster(tree, config);
    if (cluster.max_depth() < depth) return false;
    return survives_to_depth(cluster, delayed_pruning_mask(cluster, params, rng), depth);
}

bool compose_link_delay_survival(const RootedTree& tree, double beta, const PruningParams& params, int depth,
                                 Rng& rng) {
    if (std::abs(params.lambda - beta) > 1e-12 * std::max(1.0, beta))
        throw InvalidParameter("delay-link composition needs lambda equal to beta");
    if (depth > tree.max_depth()) throw InvalidParameter("depth exceeds the tree depth");
    const auto config = sample_links(tree, beta, params.u, rng);
    return compose_link_delay_survival(tree, config, params, depth, rng);
}

bool is_pruning_edge(const RootedTree& tree, const LinkConfiguration& config, VertexId e) {
    const auto links = config.links(e);
    if (links.size() != 2) return false;
    bool bars;
    if (links[0].kind == LinkKind::Cross && links[1].kind == LinkKind::Cross) bars = false;
    else if (links[0].kind == LinkKind::Bar && links[1].kind == LinkKind::Bar && config.u() == 0.0) bars = true;
    else return false;

    const double u1 = links[0].time, u2 = links[1].time;
    const auto in_inner = [&](double t) { return u1 < t && t < u2; };
    const auto in_outer = [&](double t) { return t < u1 || u2 < t; };
    const VertexId x = tree.parent(e);

    std::vector<double> entries;
    if (x == tree.root()) entries.push_back(0.0);
    else for (const Link& l : config.links(x)) entries.push_back(l.time);

    const auto works = [&](bool inner) {
        const auto in_k = [&](double t) { return inner ? in_inner(t) : in_outer(t); };
        const auto in_other = [&](double t) { return inner ? in_outer(t) : in_inner(t); };
        for (double t : entries)
            if (!in_k(t)) return false;
        for (VertexId s : tree.children(x)) {
            if (s == e) continue;
            for (const Link& l : config.links(s))
                if (in_k(l.time)) return false;
        }
        for (VertexId c : tree.children(e))
            for (const Link& l : config.links(c))
                if (bars ? in_k(l.time) : in_other(l.time)) return false;
        return true;
    };
    return works(true) || works(false);
}

void write_pruning_header(std::ostream& out) { out << "d,d_star,lambda,u,r_quadrature,r_mc,mc_stderr\n"; }

void write_pruning_row(std::ostream& out, std::size_t d, std::size_t d_star, const PruningParams& params,
                       double r_quadrature, double r_mc, double mc_stderr) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,", d, d_star, params.lambda, params.u, r_quadrature);
    out << buf;
    if (std::isnan(r_mc)) {
        out << "NA,NA\n";
        return;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r_mc, mc_stderr);
    out << buf;
}

} // namespace loopperc
