#include "loopperc/multilink.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "loopperc/errors.hpp"
#include "loopperc/parallel.hpp"

namespace loopperc {

bool MultiLinkCluster::contains(VertexId v) const {
    return std::find(member_vertices.begin(), member_vertices.end(), v) != member_vertices.end();
}

MultiLinkCluster multi_link_cluster(const RootedTree& tree, const LinkConfiguration& config, VertexId x) {
    if (!tree.contains(x)) throw LookupError("vertex " + std::to_string(x) + " not in tree");
    MultiLinkCluster c{x, {x}, {}};
    for (std::size_t i = 0; i < c.member_vertices.size(); ++i)
        for (VertexId y : tree.children(c.member_vertices[i]))
            if (config.count(y) >= 2) {
                c.member_vertices.push_back(y);
                c.member_edges.push_back(y);
            }
    return c;
}

LoopTrace multi_link_loop(const RootedTree& tree, const LinkConfiguration& config, VertexId x) {
    const auto cluster = multi_link_cluster(tree, config, x);
    std::vector<char> member(tree.size(), 0);
    for (VertexId e : cluster.member_edges) member[static_cast<std::size_t>(e)] = 1;
    const EventIndex index(tree, config, [&](VertexId e) { return member[static_cast<std::size_t>(e)] != 0; });
    return trace_loop(index, {x, 0.0, Direction::Up});
}

std::int64_t count_incident_unilinks(const RootedTree& tree, const LinkConfiguration& config,
                                     const LoopTrace& gamma, const MultiLinkCluster& cluster) {
    std::vector<char> member(tree.size(), 0);
    for (VertexId v : cluster.member_vertices) member[static_cast<std::size_t>(v)] = 1;
    std::int64_t count = 0;
    for (VertexId v : cluster.member_vertices)
        for (VertexId w : tree.children(v)) {
            if (member[static_cast<std::size_t>(w)]) continue;
            const auto links = config.links(w);
            if (links.size() == 1 && gamma.occupies(v, links[0].time)) ++count;
        }
    return count;
}

UnilinkSample sample_unilink_neighbourhood(const OffspringLaw& law, double beta, double u, int depth, Rng& rng) {
    if (!(beta > 0.0)) throw InvalidParameter("beta must be > 0");
    if (!(u >= 0.0 && u <= 1.0)) throw InvalidParameter("u must lie in [0,1]");
    if (depth < 1) throw InvalidParameter("depth must be >= 1");
    // Breadth-first growth: a vertex is expanded iff it is the root or its
    // parent edge carries two or more links, and it lies above depth D.
    std::vector<std::int64_t> counts;
    std::vector<int> depth_of{0};
    std::vector<std::vector<Link>> per_edge{{}};
    std::poisson_distribution<std::int64_t> cross_count(u > 0.0 ? u * beta : 1.0);
    std::poisson_distribution<std::int64_t> bar_count(u < 1.0 ? (1.0 - u) * beta : 1.0);
    for (std::size_t v = 0; v < depth_of.size(); ++v) {
        const bool expand = depth_of[v] < depth && (v == 0 || per_edge[v].size() >= 2);
        const std::int64_t k = expand ? law.sample(rng) : 0;
        counts.push_back(k);
        for (std::int64_t c = 0; c < k; ++c) {
            std::vector<Link> links;
            for (;;) {
                links.clear();
                const std::int64_t nc = u > 0.0 ? cross_count(rng) : 0;
                const std::int64_t nb = u < 1.0 ? bar_count(rng) : 0;
                for (std::int64_t i = 0; i < nc; ++i) links.push_back({uniform01(rng), LinkKind::Cross});
                for (std::int64_t i = 0; i < nb; ++i) links.push_back({uniform01(rng), LinkKind::Bar});
                std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) { return a.time < b.time; });
                if (std::adjacent_find(links.begin(), links.end(), [](const Link& a, const Link& b) {
                        return a.time == b.time;
                    }) == links.end())
                    break;
            }
            per_edge.push_back(std::move(links));
            depth_of.push_back(depth_of[v] + 1);
        }
    }
    return {RootedTree::from_child_counts(counts), LinkConfiguration::from_edges(per_edge, beta, u)};
}

UnilinkReport unilink_branching_criterion(const OffspringLaw& law, double beta, double u, int depth, std::size_t n,
                                          std::uint64_t seed, unsigned threads) {
    if (n < 1000) throw InvalidParameter("unilink criterion needs N >= 1000");
    const auto* poisson = std::get_if<OffspringLaw::Poisson>(&law.variant());
    const double rate = poisson ? beta * std::exp(-beta) * poisson->lambda : 0.0;
    std::vector<double> c1(n), gamma(n);
    std::vector<char> touched(n);
    parallel_for(n, threads, [&](std::size_t i) {
        Rng rng = replica_rng(seed, i);
        const auto s = sample_unilink_neighbourhood(law, beta, u, depth, rng);
        const auto cluster = multi_link_cluster(s.tree, s.config, s.tree.root());
        const auto g = multi_link_loop(s.tree, s.config, s.tree.root());
        c1[i] = static_cast<double>(count_incident_unilinks(s.tree, s.config, g, cluster));
        gamma[i] = g.length;
        int deepest = 0;
        for (VertexId v : cluster.member_vertices) deepest = std::max(deepest, s.tree.depth(v));
        touched[i] = deepest >= depth;
    });
    const auto mean_se = [n](const std::vector<double>& xs) {
        double sum = 0.0;
        for (double x : xs) sum += x;
        const double m = sum / static_cast<double>(n);
        double ss = 0.0;
        for (double x : xs) ss += (x - m) * (x - m);
        return std::make_pair(m, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)));
    };
    std::vector<double> gap(n, 0.0);
    if (poisson)
        for (std::size_t i = 0; i < n; ++i) gap[i] = c1[i] - gamma[i] * rate;
    UnilinkReport r{};
    std::tie(r.mean_C1, r.std_error) = mean_se(c1);
    std::tie(r.mean_gamma, r.gamma_std_error) = mean_se(gamma);
    std::tie(r.identity_gap, r.identity_gap_std_error) = mean_se(gap);
    r.supercritical = r.mean_C1 - 3.0 * r.std_error > 1.0;
    r.truncation_hits = static_cast<std::size_t>(std::count(touched.begin(), touched.end(), 1));
    r.n = n;
    return r;
}

void write_unilink_header(std::ostream& out) { out << "law,beta,u,D,N,mean_C1,stderr,truncation_hits\n"; }

void write_unilink_row(std::ostream& out, const OffspringLaw& law, double beta, double u, int depth,
                       const UnilinkReport& report) {
    char buf[192];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%zu,%.17g,%.17g,%zu", beta, u, depth, report.n, report.mean_C1,
                  report.std_error, report.truncation_hits);
    out << '"' << law.describe() << "\"," << buf << '\n';
}

} // namespace loopperc
