#include "loopperc/loops.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "loopperc/errors.hpp"

namespace loopperc {

namespace {

double cyc(double x) { return x < 0.0 ? x + 1.0 : x; }

struct ArcTimes {
    double start;
    double end;
    double length;
};

ArcTimes arc_times(std::span<const LinkEvent> ev, std::size_t a) {
    const std::size_t n = ev.size();
    if (a + 1 == n) return {ev[a].time, ev[0].time, 1.0 - (ev[a].time - ev[0].time)};
    return {ev[a].time, ev[a + 1].time, ev[a + 1].time - ev[a].time};
}

Segment full_segment(std::span<const LinkEvent> ev, const ArcPos& p) {
    const ArcTimes t = arc_times(ev, p.arc);
    if (p.dir == Direction::Up) return {p.vertex, t.start, t.end, p.dir, t.length};
    return {p.vertex, t.end, t.start, p.dir, t.length};
}

void finish(LoopTrace& trace, const RootedTree& tree) {
    trace.length = 0.0;
    for (const Segment& s : trace.segments) {
        trace.length += s.length;
        trace.visited_vertices.push_back(s.vertex);
    }
    std::sort(trace.visited_vertices.begin(), trace.visited_vertices.end());
    trace.visited_vertices.erase(std::unique(trace.visited_vertices.begin(), trace.visited_vertices.end()),
                                 trace.visited_vertices.end());
    trace.max_depth = 0;
    for (VertexId v : trace.visited_vertices) trace.max_depth = std::max(trace.max_depth, tree.depth(v));
}

void check_sizes(const RootedTree& tree, const LinkConfiguration& config) {
    if (tree.size() != config.vertex_count())
        throw InvalidParameter("link configuration has " + std::to_string(config.vertex_count()) +
                               " vertices, tree has " + std::to_string(tree.size()));
}

} // namespace

bool LoopTrace::occupies(VertexId v, double t) const {
    for (const Segment& s : segments) {
        if (s.vertex != v) continue;
        if (s.length >= 1.0) return true;
        const double offset = s.direction == Direction::Up ? cyc(t - s.entry) : cyc(s.entry - t);
        if (offset < s.length) return true;
    }
    return false;
}

EventIndex::EventIndex(const RootedTree& tree, const LinkConfiguration& config)
    : EventIndex(tree, config, [](VertexId) { return true; }) {}

EventIndex::EventIndex(const RootedTree& tree, const LinkConfiguration& config,
                       const std::function<bool(VertexId)>& edge_filter)
    : tree_(&tree) {
    check_sizes(tree, config);
    const std::size_t n = tree.size();
    std::vector<char> keep(n, 0);
    offsets_.assign(n + 1, 0);
    for (std::size_t x = 1; x < n; ++x) {
        const auto v = static_cast<VertexId>(x);
        keep[x] = edge_filter(v) ? 1 : 0;
        if (!keep[x]) continue;
        const std::size_t m = config.count(v);
        offsets_[x + 1] += m;
        offsets_[static_cast<std::size_t>(tree.parent(v)) + 1] += m;
    }
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
    events_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t x = 1; x < n; ++x) {
        if (!keep[x]) continue;
        const auto v = static_cast<VertexId>(x);
        const auto links = config.links(v);
        const auto p = static_cast<std::size_t>(tree.parent(v));
        for (std::size_t i = 0; i < links.size(); ++i) {
            const LinkEvent e{links[i].time, v, static_cast<std::uint32_t>(i), links[i].kind};
            events_[fill[x]++] = e;
            events_[fill[p]++] = e;
        }
    }
    arc_offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(events_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                  events_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]), event_less);
        arc_offsets_[v + 1] = arc_offsets_[v] + std::max<std::size_t>(offsets_[v + 1] - offsets_[v], 1);
    }
}

std::span<const LinkEvent> EventIndex::events(VertexId v) const {
    if (!tree_->contains(v)) throw LookupError("vertex " + std::to_string(v) + " not in tree");
    const auto x = static_cast<std::size_t>(v);
    return std::span<const LinkEvent>(events_).subspan(offsets_[x], offsets_[x + 1] - offsets_[x]);
}

LoopTrace trace_loop(const EventIndex& index, const LoopPoint& start) {
    const RootedTree& tree = index.tree();
    if (!tree.contains(start.vertex)) throw LookupError("vertex " + std::to_string(start.vertex) + " not in tree");
    if (!(start.time >= 0.0 && start.time < 1.0)) throw InvalidParameter("start time outside [0,1)");
    LoopTrace trace;
    const auto ev = index.events(start.vertex);
    const double t0 = start.time;
    if (ev.empty()) {
        trace.segments.push_back({start.vertex, t0, t0, start.direction, 1.0});
        finish(trace, tree);
        return trace;
    }
    std::size_t below = 0;
    for (const LinkEvent& e : ev) {
        if (e.time == t0) throw DegenerateStart("start time coincides with a link time");
        if (e.time < t0) ++below;
    }
    const std::size_t n = ev.size();
    const ArcPos first{start.vertex, (below == 0 || below == n) ? n - 1 : below - 1, start.direction};

    const ArcTimes ft = arc_times(ev, first.arc);
    if (first.dir == Direction::Up)
        trace.segments.push_back({first.vertex, t0, ft.end, first.dir, cyc(ft.end - t0)});
    else
        trace.segments.push_back({first.vertex, t0, ft.start, first.dir, cyc(t0 - ft.start)});

    const std::size_t bound = index.arc_count() + 2;
    for (ArcPos p = next_arc(index, first);; p = next_arc(index, p)) {
        if (p == first) {
            if (p.dir == Direction::Up)
                trace.segments.push_back({p.vertex, ft.start, t0, p.dir, cyc(t0 - ft.start)});
            else
                trace.segments.push_back({p.vertex, ft.end, t0, p.dir, cyc(ft.end - t0)});
            break;
        }
        trace.segments.push_back(full_segment(index.events(p.vertex), p));
        if (trace.segments.size() > bound) throw std::logic_error("loop trace did not close");
    }
    finish(trace, tree);
    return trace;
}

LoopTrace trace_loop(const RootedTree& tree, const LinkConfiguration& config, const LoopPoint& start) {
    return trace_loop(EventIndex(tree, config), start);
}

std::vector<LoopTrace> all_loops(const EventIndex& index) {
    const RootedTree& tree = index.tree();
    std::vector<char> seen(index.arc_count(), 0);
    std::vector<LoopTrace> loops;
    for (std::size_t x = 0; x < tree.size(); ++x) {
        const auto v = static_cast<VertexId>(x);
        const auto ev = index.events(v);
        if (ev.empty()) {
            LoopTrace trace;
            trace.segments.push_back({v, 0.0, 0.0, Direction::Up, 1.0});
            finish(trace, tree);
            loops.push_back(std::move(trace));
            continue;
        }
        for (std::size_t a = 0; a < ev.size(); ++a) {
            if (seen[index.arc_offset(v) + a]) continue;
            LoopTrace trace;
            walk_loop(index, ArcPos{v, a, Direction::Up}, [&](const ArcPos& p) {
                seen[index.arc_offset(p.vertex) + p.arc] = 1;
                trace.segments.push_back(full_segment(index.events(p.vertex), p));
                return true;
            });
            finish(trace, tree);
            loops.push_back(std::move(trace));
        }
    }
    return loops;
}

std::vector<LoopTrace> all_loops(const RootedTree& tree, const LinkConfiguration& config) {
    return all_loops(EventIndex(tree, config));
}

void write_loops_csv(std::ostream& out, const std::vector<LoopTrace>& loops) {
    out << "loop_id,vertex,entry,exit,direction\n";
    char buf[96];
    for (std::size_t i = 0; i < loops.size(); ++i) {
        for (const Segment& s : loops[i].segments) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", s.entry, s.exit);
            out << i << ',' << s.vertex << ',' << buf << ',' << (s.direction == Direction::Up ? '+' : '-') << '\n';
        }
    }
}

} // namespace loopperc
