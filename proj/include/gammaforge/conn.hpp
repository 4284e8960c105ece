#pragma once

#include <climits>
#include <optional>
#include <span>
#include <vector>

#include "gammaforge/lgraph.hpp"
#include "gammaforge/multigraph.hpp"

namespace gammaforge {

/// Dinic max-flow over integer capacities. Undirected edges are modelled as
/// an arc pair that share capacity (each arc is the other's reverse).
class FlowNetwork {
public:
    explicit FlowNetwork(int nodes);
    /// Drops every arc and resizes to `nodes`, keeping allocated storage.
    void reset(int nodes);

    int add_arc(int from, int to, int capacity);
    int add_undirected(int u, int v, int capacity);

    /// Augments up to `limit` units from s to t; returns the total flow.
    int max_flow(int s, int t, int limit = INT_MAX);
    /// Nodes reachable from s in the residual network of the last max_flow.
    std::vector<char> residual_reachable(int s) const;
    /// Net flow on the arc in its own direction.
    int flow(int arc) const { return arcs_[arc].flow; }
    int node_count() const noexcept { return static_cast<int>(adj_.size()); }

    struct Arc {
        int to;
        int capacity;
        int flow;
        int rev;
    };
    const Arc& arc(int id) const { return arcs_[id]; }
    const std::vector<int>& out_arcs(int node) const { return adj_[node]; }

private:
    bool bfs(int s, int t);
    int dfs(int v, int t, int pushed);

    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> level_, next_, queue_;
};

/// Walk through a Multigraph; OrientedEdge::edge is an edge position and
/// `forward` means traversal from edges[e].first to edges[e].second.
using Walk = std::vector<OrientedEdge>;

Vertex walk_tail(const Multigraph& g, const Walk& w);
Vertex walk_head(const Multigraph& g, const Walk& w);

/// Converts a positional walk over g.underlying() to an id-based trail.
Trail to_trail(const LabeledGraph& g, const Walk& w);
Walk to_walk(const LabeledGraph& g, const Trail& t);

int degree(const Multigraph& g, Vertex v);

/// Value of a minimum u-v edge cut (loops ignored). Stops early at `limit`.
int edge_connectivity(const Multigraph& g, Vertex u, Vertex v, int limit = INT_MAX);

struct MinCut {
    int value = 0;
    /// Smallest source side: vertices reachable from the sources in the
    /// residual graph of a maximum flow.
    VertexSet source_side;
};

/// Minimum edge cut separating `sources` from `sinks` (each set contracted
/// to one terminal). Only edges with usable[e] != 0 are present when
/// `usable` is non-empty.
MinCut min_cut(const Multigraph& g, const VertexSet& sources, const VertexSet& sinks,
               std::span<const char> usable = {});

struct RoutedWalks {
    int value = 0;
    std::vector<Walk> walks;
    std::vector<Vertex> starts;
    std::vector<Vertex> ends;
};

/// Edge-disjoint walks (trails) from the supply vertices to the demand
/// vertices, each vertex carrying the given capacity, up to `limit` units.
RoutedWalks route_trails(const Multigraph& g, std::span<const std::pair<Vertex, int>> supply,
                         std::span<const std::pair<Vertex, int>> demand, int limit = INT_MAX,
                         std::span<const char> usable = {});

/// Connected components (by vertex sets, sorted by smallest vertex).
std::vector<VertexSet> components(const Multigraph& g, std::span<const char> usable = {});

/// Positions of bridge edges.
std::vector<int> bridges(const Multigraph& g, std::span<const char> usable = {});

/// Vertex partition into edge-blocks (maximal connected bridgeless
/// subgraphs), sorted by smallest vertex.
std::vector<VertexSet> edge_blocks(const Multigraph& g, std::span<const char> usable = {});

/// Index into `blocks` of the block that holds v.
int block_of(const std::vector<VertexSet>& blocks, Vertex v);

/// Connected, bridgeless. A single vertex counts as 2-edge-connected.
bool is_two_edge_connected(const Multigraph& g);

struct EarDecomposition {
    /// ears[0] is a cycle; each later ear is a path or a cycle.
    std::vector<Walk> ears;
};

/// Empty string if `d` is a valid ear decomposition of all of g, else the
/// first violated property.
std::string ear_decomposition_problem(const Multigraph& g, const EarDecomposition& d);

/// Ear decomposition of a 2-edge-connected graph with at least one edge.
/// When `start` is given it must be a cycle and becomes ears[0].
EarDecomposition ear_decomposition(const Multigraph& g, const std::optional<Walk>& start = {});

/// A cycle through `x` (a loop if one exists), or nullopt if x lies on none.
std::optional<Walk> cycle_through(const Multigraph& g, Vertex x, std::span<const char> usable = {});

struct CorePartition {
    int t = 0;
    std::vector<VertexSet> cores;
};

/// t-cores: classes of the (t+1)-edge-connectivity relation among
/// vertices of degree >= t+1, sorted by smallest vertex.
CorePartition t_cores(const Multigraph& g, int t);

/// Whether every A with v in A, A subset of C, has |delta(A)| >= |delta(C)|.
bool is_fully_connected(const Multigraph& g, Vertex v, const VertexSet& c);

/// |delta(S)| ignoring loops.
int cut_size(const Multigraph& g, const VertexSet& s);

struct Contraction {
    Multigraph graph;
    /// old vertex -> new vertex
    std::vector<Vertex> map;
    Vertex merged = 0;
    /// new edge position -> old edge position
    std::vector<int> edge_origin;
};

/// Identifies `c` to one vertex (numbered after the survivors), dropping
/// loops at the merged vertex.
Contraction contract(const Multigraph& g, const VertexSet& c);

/// Subgraph induced by the vertex set; vertices renumbered in sorted order.
struct InducedSubgraph {
    Multigraph graph;
    std::vector<Vertex> to_parent;
    std::vector<int> edge_to_parent;
};
InducedSubgraph induced(const Multigraph& g, const VertexSet& s, std::span<const char> usable = {});

}  // namespace gammaforge
