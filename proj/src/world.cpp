#include "loopperc/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "loopperc/errors.hpp"

namespace loopperc {

namespace {

constexpr std::uint64_t kOffspringSalt = 0x6f66667370726e67ULL;
constexpr std::uint64_t kLinkSalt = 0x6c696e6b73747265ULL;
constexpr std::uint64_t kVertexSalt = 0x7665727465787575ULL;

double exponential(SplitMix64& g) { return -std::log1p(-uniform01(g)); }

} // namespace

TreeSpec TreeSpec::regular(int d) {
    if (d < 2) throw InvalidParameter("regular tree needs d >= 2");
    return TreeSpec(Regular{d});
}

TreeSpec TreeSpec::galton_watson(OffspringLaw law, bool quenched) { return TreeSpec(Law{std::move(law), quenched}); }

TreeSpec TreeSpec::explicit_tree(RootedTree tree, std::string source) {
    return TreeSpec(Explicit{std::make_shared<const RootedTree>(std::move(tree)), std::move(source)});
}

TreeSpec TreeSpec::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw InvalidParameter("tree spec '" + std::string(text) + "' has no kind");
    const auto kind = text.substr(0, colon);
    const auto rest = text.substr(colon + 1);
    if (kind == "regular") {
        int d = 0;
        try {
            std::size_t used = 0;
            d = std::stoi(std::string(rest), &used);
            if (used != rest.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InvalidParameter("tree spec '" + std::string(text) + "': cannot parse d");
        }
        return regular(d);
    }
    if (kind == "gw") return galton_watson(OffspringLaw::parse(rest), false);
    if (kind == "gw-quenched") return galton_watson(OffspringLaw::parse(rest), true);
    if (kind == "file") {
        std::ifstream in{std::string(rest)};
        if (!in) throw InvalidParameter("cannot open tree file '" + std::string(rest) + "'");
        return explicit_tree(read_tree_csv(in), "file:" + std::string(rest));
    }
    throw InvalidParameter("unknown tree kind '" + std::string(kind) + "'");
}

std::string TreeSpec::describe() const {
    struct Visitor {
        std::string operator()(const Regular& r) const { return "regular:" + std::to_string(r.d); }
        std::string operator()(const Law& l) const {
            return (l.quenched ? "gw-quenched:" : "gw:") + l.law.describe();
        }
        std::string operator()(const Explicit& e) const { return e.source; }
    };
    return std::visit(Visitor{}, v_);
}

std::optional<int> TreeSpec::max_depth() const {
    if (const auto* e = std::get_if<Explicit>(&v_)) return e->tree->max_depth();
    return std::nullopt;
}

LazyWorld::LazyWorld(const TreeSpec& spec, std::uint64_t tree_key, std::uint64_t link_key, double beta, double u,
                     int depth)
    : spec_(&spec), beta_(beta), u_(u), cut_(depth) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidParameter("beta must be finite and > 0");
    if (!(u >= 0.0 && u <= 1.0)) throw InvalidParameter("u must lie in [0,1]");
    if (depth < 0) throw InvalidParameter("depth must be >= 0");
    if (const auto top = spec.max_depth(); top && *top < depth)
        throw InvalidParameter("depth " + std::to_string(depth) + " exceeds the tree depth " + std::to_string(*top));
    const VertexId ex = std::holds_alternative<TreeSpec::Explicit>(spec.variant()) ? 0 : kNoVertex;
    nodes_.push_back(Node{kNoVertex, 0, tree_key, link_key, ex, kNoVertex, -1, false, false, {}, {}});
}

std::int64_t LazyWorld::offspring(const Node& n) const {
    if (n.depth >= cut_) return 0;
    struct Visitor {
        const Node& n;
        std::int64_t operator()(const TreeSpec::Regular& r) const { return n.depth == 0 ? r.d : r.d - 1; }
        std::int64_t operator()(const TreeSpec::Law& l) const {
            SplitMix64 g(derive_key(n.tree_key, kOffspringSalt));
            return l.law.sample(g);
        }
        std::int64_t operator()(const TreeSpec::Explicit& e) const {
            return static_cast<std::int64_t>(e.tree->child_count(n.explicit_id));
        }
    };
    return std::visit(Visitor{n}, spec_->variant());
}

std::span<const VertexId> LazyWorld::children(VertexId v) {
    if (nodes_[idx(v)].child_count < 0) {
        const std::int64_t k = offspring(nodes_[idx(v)]);
        const auto* ex = std::get_if<TreeSpec::Explicit>(&spec_->variant());
        const auto first = static_cast<VertexId>(nodes_.size());
        const auto first_slot = static_cast<VertexId>(child_ids_.size());
        for (std::int64_t i = 0; i < k; ++i) {
            const Node& p = nodes_[idx(v)];
            const auto ui = static_cast<std::uint64_t>(i);
            const VertexId eid = ex ? ex->tree->children(p.explicit_id)[static_cast<std::size_t>(i)] : kNoVertex;
            nodes_.push_back(Node{v, p.depth + 1, derive_key(p.tree_key, ui), derive_key(p.link_key, ui), eid, kNoVertex, -1, false, false, {}, {}});
            child_ids_.push_back(first + static_cast<VertexId>(i));
        }
        nodes_[idx(v)].first_child = first_slot;
        nodes_[idx(v)].child_count = static_cast<std::int32_t>(k);
    }
    const Node& n = nodes_[idx(v)];
    return std::span<const VertexId>(child_ids_).subspan(static_cast<std::size_t>(n.first_child),
                                                        static_cast<std::size_t>(n.child_count));
}

bool LazyWorld::retained(VertexId c) const {
    SplitMix64 g(derive_key(nodes_[idx(c)].link_key, kLinkSalt));
    return exponential(g) < beta_;
}

std::span<const Link> LazyWorld::edge_links(VertexId c) {
    Node& n = nodes_[idx(c)];
    if (!n.links_ready) {
        SplitMix64 g(derive_key(n.link_key, kLinkSalt));
        for (double s = exponential(g); s < beta_; s += exponential(g)) {
            const double t = uniform01(g);
            const LinkKind kind = uniform01(g) < u_ ? LinkKind::Cross : LinkKind::Bar;
            n.links.push_back({t, kind});
        }
        std::sort(n.links.begin(), n.links.end(), [](const Link& a, const Link& b) { return a.time < b.time; });
        n.links_ready = true;
    }
    return n.links;
}

double LazyWorld::vertex_uniform(VertexId v) const {
    SplitMix64 g(derive_key(nodes_[idx(v)].link_key, kVertexSalt));
    return uniform01(g);
}

std::span<const LinkEvent> LazyWorld::events(VertexId v) {
    if (!nodes_[idx(v)].events_ready) {
        std::vector<LinkEvent> ev;
        const auto add = [&](VertexId edge) {
            const auto links = edge_links(edge);
            for (std::size_t i = 0; i < links.size(); ++i)
                ev.push_back({links[i].time, edge, static_cast<std::uint32_t>(i), links[i].kind});
        };
        if (v != root()) add(v);
        const auto kids = children(v);
        const std::vector<VertexId> copy(kids.begin(), kids.end());
        for (VertexId c : copy) add(c);
        std::sort(ev.begin(), ev.end(), event_less);
        Node& n = nodes_[idx(v)];
        n.events = std::move(ev);
        n.events_ready = true;
    }
    return nodes_[idx(v)].events;
}

} // namespace loopperc
