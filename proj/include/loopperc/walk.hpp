#pragma once

#include <algorithm>
#include <cstdint>
#include <span>

#include "loopperc/links.hpp"
#include "loopperc/tree.hpp"

namespace loopperc {

enum class Direction : std::uint8_t { Up, Down };

inline Direction flip(Direction d) { return d == Direction::Up ? Direction::Down : Direction::Up; }

// A link seen from one of its endpoints. `edge` is the child id of the edge
// carrying it and `index` its position in that edge's list.
struct LinkEvent {
    double time;
    VertexId edge;
    std::uint32_t index;
    LinkKind kind;
};

// Order of the merged per-vertex event lists. Ties in time are broken by
// (edge, index), so every event has a unique position.
inline bool event_less(const LinkEvent& a, const LinkEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.edge != b.edge) return a.edge < b.edge;
    return a.index < b.index;
}

// The circle of a vertex with events t_0 <= ... <= t_{n-1} is cut into n arcs;
// arc k runs from t_k to t_{k+1}, arc n-1 wraps from t_{n-1} through 1 = 0
// to t_0. A vertex without events has the single arc 0 (the full circle).
struct ArcPos {
    VertexId vertex;
    std::size_t arc;
    Direction dir;

    friend bool operator==(const ArcPos&, const ArcPos&) = default;
};

// The arc entered after running through `p` to its end. `Source` provides
//   span<const LinkEvent> events(VertexId)
//   VertexId other_end(VertexId, const LinkEvent&)
// and must not be called on a vertex without events.
template <class Source>
ArcPos next_arc(Source& src, const ArcPos& p) {
    const LinkEvent hit = [&] {
        const auto ev = src.events(p.vertex);
        const std::size_t e = p.dir == Direction::Up ? (p.arc + 1 == ev.size() ? 0 : p.arc + 1) : p.arc;
        return ev[e];
    }();
    const VertexId w = src.other_end(p.vertex, hit);
    const auto ev = src.events(w);
    const auto pos = static_cast<std::size_t>(std::lower_bound(ev.begin(), ev.end(), hit, event_less) - ev.begin());
    const Direction nd = hit.kind == LinkKind::Cross ? p.dir : flip(p.dir);
    const std::size_t arc = nd == Direction::Up ? pos : (pos == 0 ? ev.size() - 1 : pos - 1);
    return {w, arc, nd};
}

// Runs the loop through `start`, calling visit(ArcPos) for every arc
// including the first, until the loop closes or visit returns false.
// Returns false iff stopped early.
template <class Source, class Visit>
bool walk_loop(Source& src, const ArcPos& start, Visit&& visit) {
    if (!visit(start)) return false;
    if (src.events(start.vertex).empty()) return true;
    for (ArcPos p = next_arc(src, start); !(p == start); p = next_arc(src, p))
        if (!visit(p)) return false;
    return true;
}

} // namespace loopperc
