#pragma once

// Brute-force reference implementations. Each one enumerates the definition
// directly and shares no search code with the library.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "gammaforge/group.hpp"
#include "gammaforge/lgraph.hpp"
#include "gammaforge/multigraph.hpp"

namespace gftest {

using gammaforge::Element;
using gammaforge::FiniteGroup;
using gammaforge::GroupPtr;
using gammaforge::LabeledGraph;
using gammaforge::Multigraph;
using gammaforge::Vertex;
using gammaforge::VertexSet;

// Proper subgroups found by testing every subset for closure.
std::vector<std::vector<Element>> proper_subgroups(const FiniteGroup& g);

bool in_set(const std::vector<Element>& s, Element a);

// Length of a shortest word over gens equal to target, by enumerating all
// words of increasing length; -1 if none has length <= max_len.
int shortest_word_length(const FiniteGroup& g, const std::vector<Element>& gens, Element target, int max_len);

// Whether h is an immersion of g up to shifting: closes g under edge
// deletion and split-offs at every vertex, then looks for h as a
// labeled subgraph (injective on vertices and edges) up to a shift.
bool immerses(const LabeledGraph& g, const LabeledGraph& h);

// Minimum over proper subgroups and all shifts sigma in G^B of the number of
// edges inside B labeled outside the subgroup; the value is |delta(B)| plus
// twice that.
int set_value(const LabeledGraph& g, const VertexSet& b);

// Edge-id sets of all circuits starting at x whose label lies outside sub.
// Each closed trail is listed once per traversal direction collapsed to its
// edge set.
std::set<std::vector<int>> qualifying_edge_sets(const LabeledGraph& g, Vertex x, const std::vector<Element>& sub);

// All circuits starting at x labeled outside sub, as (edge id, forward)
// sequences, both directions included.
std::vector<std::vector<std::pair<int, bool>>> qualifying_circuits(const LabeledGraph& g, Vertex x,
                                                                   const std::vector<Element>& sub);

// Smallest number of edges whose removal kills every qualifying circuit,
// trying all subsets by size; -1 if the minimum exceeds max_size.
int min_cover(const LabeledGraph& g, Vertex x, const std::vector<Element>& sub, int max_size);

// Maximum number of pairwise edge-disjoint qualifying circuits.
int max_packing(const LabeledGraph& g, Vertex x, const std::vector<Element>& sub);

int cut(const Multigraph& m, const std::vector<char>& in);

// min |delta(A)| over all A with u in A and v not in A.
int edge_connectivity(const Multigraph& m, Vertex u, Vertex v);

// For every A subset of c containing v, |delta(A)| >= |delta(c)|.
bool fully_connected(const Multigraph& m, Vertex v, const VertexSet& c);

// Random labeled multigraph; vertices named v0..v{n-1}.
LabeledGraph random_graph(std::mt19937_64& rng, const GroupPtr& grp, int vertices, int edges,
                          bool loops = true);

// Hamiltonian cycle plus random chords: 2-edge-connected.
LabeledGraph random_bridgeless(std::mt19937_64& rng, const GroupPtr& grp, int vertices, int chords);

}  // namespace gftest
