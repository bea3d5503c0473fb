#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "loopperc/links.hpp"
#include "loopperc/tree.hpp"
#include "loopperc/walk.hpp"

namespace loopperc {

struct LoopPoint {
    VertexId vertex;
    double time;
    Direction direction = Direction::Up;
};

// Occupation of one vertex between two jumps. `length` is measured on the
// circle; a full turn has entry == exit and length 1.
struct Segment {
    VertexId vertex;
    double entry;
    double exit;
    Direction direction;
    double length;
};

struct LoopTrace {
    std::vector<Segment> segments;
    double length = 0.0;
    std::vector<VertexId> visited_vertices;  // sorted
    int max_depth = 0;

    // Whether the loop is at vertex v at time t. Segment ends are half open,
    // closed on the entry side.
    bool occupies(VertexId v, double t) const;
};

// Merged, sorted event lists of all vertices of a tree for one link
// configuration. Keeps a reference to the tree.
class EventIndex {
public:
    EventIndex(const RootedTree& tree, const LinkConfiguration& config);
    // Only links on edges with edge_filter(child id) true are indexed.
    EventIndex(const RootedTree& tree, const LinkConfiguration& config,
               const std::function<bool(VertexId)>& edge_filter);

    const RootedTree& tree() const { return *tree_; }
    std::span<const LinkEvent> events(VertexId v) const;
    VertexId other_end(VertexId v, const LinkEvent& e) const { return e.edge == v ? tree_->parent(v) : e.edge; }

    // Number of arcs over all vertices.
    std::size_t arc_count() const { return arc_offsets_.back(); }
    // Arcs of v are numbered [arc_offset(v), arc_offset(v+1)).
    std::size_t arc_offset(VertexId v) const { return arc_offsets_[static_cast<std::size_t>(v)]; }

private:
    const RootedTree* tree_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> arc_offsets_;
    std::vector<LinkEvent> events_;
};

LoopTrace trace_loop(const EventIndex& index, const LoopPoint& start);
LoopTrace trace_loop(const RootedTree& tree, const LinkConfiguration& config, const LoopPoint& start);

// Every loop, ordered by (smallest vertex, smallest entry time).
std::vector<LoopTrace> all_loops(const EventIndex& index);
std::vector<LoopTrace> all_loops(const RootedTree& tree, const LinkConfiguration& config);

inline bool loop_reaches_depth(const LoopTrace& trace, int depth) { return trace.max_depth >= depth; }

// "loop_id,vertex,entry,exit,direction" rows.
void write_loops_csv(std::ostream& out, const std::vector<LoopTrace>& loops);

} // namespace loopperc
