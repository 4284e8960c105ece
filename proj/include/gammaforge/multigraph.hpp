#pragma once

#include <utility>
#include <vector>

namespace gammaforge {

using Vertex = int;

/// Plain undirected multigraph on vertices 0..vertex_count-1. Edges are
/// addressed by position; loops and parallel edges are allowed.
struct Multigraph {
    int vertex_count = 0;
    std::vector<std::pair<Vertex, Vertex>> edges;

    int edge_count() const noexcept { return static_cast<int>(edges.size()); }
    int add_edge(Vertex u, Vertex v) {
        edges.emplace_back(u, v);
        return edge_count() - 1;
    }

    /// Positions of edges incident to each vertex; a loop is listed once.
    std::vector<std::vector<int>> incidence() const;

    /// Endpoint of edge `e` opposite to `v` (v itself for a loop).
    Vertex other(int e, Vertex v) const {
        return edges[e].first == v ? edges[e].second : edges[e].first;
    }
};

/// Sorted, duplicate-free list of vertices.
using VertexSet = std::vector<Vertex>;

VertexSet normalized(VertexSet s);
std::vector<char> membership(const VertexSet& s, int vertex_count);

}  // namespace gammaforge
