#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gammaforge/group.hpp"
#include "gammaforge/multigraph.hpp"

namespace gammaforge {

/// An edge with its label in the tail -> head orientation. The reverse
/// orientation carries the inverse label; it is never stored.
struct Edge {
    int id = 0;
    Vertex tail = 0;
    Vertex head = 0;
    Element label = 0;

    bool is_loop() const noexcept { return tail == head; }
    bool operator==(const Edge&) const = default;
};

struct OrientedEdge {
    int edge = 0;
    bool forward = true;

    OrientedEdge reversed() const noexcept { return {edge, !forward}; }
    auto operator<=>(const OrientedEdge&) const = default;
};

/// Sequence of oriented edges with distinct underlying edges where each head
/// meets the next tail. A circuit is a trail whose head equals its tail.
struct Trail {
    std::vector<OrientedEdge> steps;

    std::size_t size() const noexcept { return steps.size(); }
    bool empty() const noexcept { return steps.empty(); }
    auto operator<=>(const Trail&) const = default;
};

/// Transition stored in canonical orientation: the smaller of
/// (a, b) and (b^-1, a^-1).
struct Transition {
    OrientedEdge first;
    OrientedEdge second;

    auto operator<=>(const Transition&) const = default;
};

Transition canonical_transition(OrientedEdge a, OrientedEdge b);

/// Per-vertex shift sigma: the label of an oriented edge u -> v becomes
/// sigma(u) * label * sigma(v)^-1.
using ShiftAssignment = std::vector<Element>;

class LabeledGraph {
public:
    LabeledGraph() = default;
    /// Validates endpoints, labels and edge-id uniqueness.
    LabeledGraph(GroupPtr group, std::vector<std::string> vertex_names, std::vector<Edge> edges);

    /// Vertices named "0".."n-1", no edges.
    static LabeledGraph with_vertices(GroupPtr group, int n);

    const GroupPtr& group() const noexcept { return group_; }
    const FiniteGroup& G() const noexcept { return *group_; }

    int vertex_count() const noexcept { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& vertex_names() const noexcept { return names_; }
    const std::string& vertex_name(Vertex v) const { return names_.at(v); }
    std::optional<Vertex> find_vertex(std::string_view name) const;
    bool has_vertex(Vertex v) const noexcept { return v >= 0 && v < vertex_count(); }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    bool has_edge(int id) const noexcept { return position(id) >= 0; }
    /// Position of the edge with this id in edges(), or -1.
    int position(int id) const noexcept {
        return id >= 0 && id < static_cast<int>(pos_.size()) ? pos_[id] : -1;
    }
    const Edge& edge(int id) const;
    int next_edge_id() const noexcept { return static_cast<int>(pos_.size()); }

    Vertex tail(OrientedEdge e) const;
    Vertex head(OrientedEdge e) const;
    Element label(OrientedEdge e) const;

    /// Same vertex set, all edges relabeled by `sigma`.
    LabeledGraph shifted(const ShiftAssignment& sigma) const;
    /// Drops the edges with the given ids (unknown ids are ignored).
    LabeledGraph without_edges(std::span<const int> ids) const;
    /// Appends an edge with a fresh id; returns the new graph.
    LabeledGraph with_edge(Vertex tail, Vertex head, Element label) const;

    /// Underlying multigraph; edge positions match edges().
    Multigraph underlying() const;

    bool operator==(const LabeledGraph& other) const;

private:
    GroupPtr group_;
    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<int> pos_;
};

ShiftAssignment identity_shift(const LabeledGraph& g);

/// Shift by `alpha` at `v`.
LabeledGraph shift(const LabeledGraph& g, Vertex v, Element alpha);

/// Applies the per-vertex assignment.
inline LabeledGraph apply_shift(const LabeledGraph& g, const ShiftAssignment& sigma) {
    return g.shifted(sigma);
}

/// sigma2 after sigma1, as a single assignment: (sigma2 o sigma1)(v) = sigma2(v) * sigma1(v).
ShiftAssignment compose_shifts(const FiniteGroup& grp, const ShiftAssignment& sigma2,
                               const ShiftAssignment& sigma1);

/// Empty string when `t` is a valid trail of `g`, else the reason.
std::string trail_problem(const LabeledGraph& g, const Trail& t);
/// Throws InvalidParameter unless `t` is a valid nonempty trail.
void validate_trail(const LabeledGraph& g, const Trail& t);

Vertex trail_tail(const LabeledGraph& g, const Trail& t);
Vertex trail_head(const LabeledGraph& g, const Trail& t);
bool is_circuit(const LabeledGraph& g, const Trail& t);

Element trail_label(const LabeledGraph& g, const Trail& t);
/// Label of the trail after shifting by sigma: sigma(tail) * label * sigma(head)^-1.
Element shifted_trail_label(const LabeledGraph& g, const Trail& t, const ShiftAssignment& sigma);

Trail inverse(const Trail& t);
Trail concat(const Trail& a, const Trail& b);
std::vector<Transition> transitions(const Trail& t);

/// Rotation starting at step `i` (0-based). Throws unless `c` is a circuit.
Trail cyclic_reorder(const LabeledGraph& g, const Trail& c, std::size_t i);

struct SplitOffResult {
    LabeledGraph graph;
    int new_edge = 0;
};

/// Replaces the underlying edges of `a` and `b` by one edge from tail(a) to
/// head(b) labeled label(a)*label(b). The new edge is stored with its
/// smaller-index endpoint as tail (loops: the smaller of label and inverse),
/// so split_off(a, b) and split_off(b^-1, a^-1) give equal graphs.
SplitOffResult split_off(const LabeledGraph& g, OrientedEdge a, OrientedEdge b);

/// A shift assignment turning the labeling of g1 into that of g2, if one
/// exists. The graphs must share vertices and edges (ids and endpoints).
std::optional<ShiftAssignment> shifting_equivalent(const LabeledGraph& g1, const LabeledGraph& g2);

/// Edges with both ends in `b`, including loops (by id).
std::vector<int> inner_edges(const LabeledGraph& g, const VertexSet& b);
/// Edges with exactly one end in `b` (by id).
std::vector<int> boundary_edges(const LabeledGraph& g, const VertexSet& b);

}  // namespace gammaforge
