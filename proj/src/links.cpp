#include "loopperc/links.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "loopperc/errors.hpp"

namespace loopperc {

const char* to_string(LinkKind kind) { return kind == LinkKind::Cross ? "cross" : "bar"; }

namespace {

void check_rates(double beta, double u) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidParameter("beta must be finite and > 0");
    if (!(u >= 0.0 && u <= 1.0)) throw InvalidParameter("u must lie in [0,1]");
}

} // namespace

LinkConfiguration::LinkConfiguration(std::size_t vertex_count, double beta, double u)
    : offsets_(vertex_count + 1, 0), beta_(beta), u_(u) {
    if (vertex_count == 0) throw InvalidParameter("link configuration needs at least one vertex");
}

LinkConfiguration LinkConfiguration::from_edges(const std::vector<std::vector<Link>>& per_edge, double beta,
                                                double u) {
    if (per_edge.empty()) throw InvalidParameter("link configuration needs at least one vertex");
    if (!per_edge.front().empty()) throw InvalidParameter("the root has no parent edge to carry links");
    LinkConfiguration c;
    c.beta_ = beta;
    c.u_ = u;
    c.offsets_.reserve(per_edge.size() + 1);
    c.offsets_.push_back(0);
    for (std::size_t x = 0; x < per_edge.size(); ++x) {
        const auto& list = per_edge[x];
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (!(list[i].time >= 0.0 && list[i].time < 1.0))
                throw InvalidParameter("link time outside [0,1) on edge " + std::to_string(x));
            if (i > 0 && !(list[i - 1].time < list[i].time))
                throw InvalidParameter("link times not strictly increasing on edge " + std::to_string(x));
        }
        c.links_.insert(c.links_.end(), list.begin(), list.end());
        c.offsets_.push_back(c.links_.size());
    }
    return c;
}

std::span<const Link> LinkConfiguration::links(VertexId edge) const {
    if (edge <= 0 || static_cast<std::size_t>(edge) >= vertex_count())
        throw LookupError("edge " + std::to_string(edge) + " not in tree");
    const auto x = static_cast<std::size_t>(edge);
    return std::span<const Link>(links_).subspan(offsets_[x], offsets_[x + 1] - offsets_[x]);
}

std::vector<std::vector<Link>> LinkConfiguration::per_edge() const {
    std::vector<std::vector<Link>> out(vertex_count());
    for (std::size_t x = 1; x < vertex_count(); ++x) {
        const auto l = links(static_cast<VertexId>(x));
        out[x].assign(l.begin(), l.end());
    }
    return out;
}

LinkConfiguration sample_links(const RootedTree& tree, double beta, double u, Rng& rng) {
    check_rates(beta, u);
    LinkConfiguration c(tree.size(), beta, u);
    std::poisson_distribution<std::int64_t> cross_count(u > 0.0 ? u * beta : 1.0);
    std::poisson_distribution<std::int64_t> bar_count(u < 1.0 ? (1.0 - u) * beta : 1.0);
    const auto by_time = [](const Link& a, const Link& b) { return a.time < b.time; };
    const auto same_time = [](const Link& a, const Link& b) { return a.time == b.time; };
    c.links_.reserve(static_cast<std::size_t>(beta * static_cast<double>(tree.size()) * 1.1) + 16);
    for (std::size_t x = 1; x < tree.size(); ++x) {
        const auto first = static_cast<std::ptrdiff_t>(c.links_.size());
        for (;;) {
            c.links_.resize(static_cast<std::size_t>(first));
            const std::int64_t crosses = u > 0.0 ? cross_count(rng) : 0;
            const std::int64_t bars = u < 1.0 ? bar_count(rng) : 0;
            for (std::int64_t i = 0; i < crosses; ++i) c.links_.push_back({uniform01(rng), LinkKind::Cross});
            for (std::int64_t i = 0; i < bars; ++i) c.links_.push_back({uniform01(rng), LinkKind::Bar});
            const auto begin = c.links_.begin() + first;
            std::sort(begin, c.links_.end(), by_time);
            if (std::adjacent_find(begin, c.links_.end(), same_time) == c.links_.end()) break;
        }
        c.offsets_[x + 1] = c.links_.size();
    }
    return c;
}

bool is_retained(const LinkConfiguration& config, VertexId edge) { return config.count(edge) >= 1; }

void write_links_csv(std::ostream& out, const LinkConfiguration& config) {
    out << "edge_child_id,time,kind\n";
    char buf[64];
    for (std::size_t x = 1; x < config.vertex_count(); ++x) {
        for (const Link& l : config.links(static_cast<VertexId>(x))) {
            std::snprintf(buf, sizeof buf, "%.17g", l.time);
            out << x << ',' << buf << ',' << to_string(l.kind) << '\n';
        }
    }
}

} // namespace loopperc
