#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gammaforge/flower.hpp"
#include "gammaforge/group.hpp"
#include "gammaforge/immerse.hpp"
#include "gammaforge/lgraph.hpp"

namespace gammaforge {

/// Pairwise edge-disjoint circuits that begin at `center`, each labeled
/// outside the subgroup it was built for.
struct SimpleFlower {
    Vertex center = 0;
    std::vector<Trail> circuits;
};

/// Empty string when `sf` is a simple flower for (x, sub) in g, else the
/// first problem found.
std::string simple_flower_problem(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                  const SimpleFlower& sf);

/// Every circuit beginning at x with label outside `sub`, one per inverse
/// pair (the lexicographically smaller of C and C^-1). Edges with
/// usable[position] == 0 are skipped when `usable` is non-empty. Throws
/// BudgetExceeded after `max_nodes` search steps.
std::vector<Trail> enumerate_qualifying_circuits(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                                 std::span<const char> usable = {},
                                                 std::uint64_t max_nodes = 5'000'000);

/// Exact test for a circuit beginning at x labeled outside `sub`, using an
/// ear decomposition of x's edge-block. Returns a witness circuit or nullopt.
std::optional<Trail> find_qualifying_circuit(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                             std::span<const char> usable = {});

/// Shift assignment with sigma(x) = 1, identity outside the edge-block of x,
/// under which every edge of that block is labeled in `sub`. Throws
/// Precondition (naming a witness circuit) when a circuit at x is labeled
/// outside `sub`.
ShiftAssignment relabel_edge_block(const LabeledGraph& g, Vertex x, const Subgroup& sub);

struct PackBudget {
    std::uint64_t max_nodes = 5'000'000;
};

/// r pairwise edge-disjoint qualifying circuits, or nullopt when none exist.
/// Throws BudgetExceeded when the search cannot decide within budget.
std::optional<SimpleFlower> find_simple_flower(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                               int r, PackBudget budget = {});

/// A smallest edge set (by id) meeting every qualifying circuit, searched by
/// size up to `max_size`; nullopt if every such set is larger.
std::optional<std::vector<int>> find_cover(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                           int max_size, PackBudget budget = {});

struct PackOrCover {
    std::optional<SimpleFlower> packing;
    std::optional<std::vector<int>> cover;
    /// Human-readable record of how the answer was reached and checked.
    std::vector<std::string> transcript;
};

/// Either r disjoint qualifying circuits at x or a cover of at most 2r-2
/// edges. Throws BudgetExceeded if the search runs out before deciding.
PackOrCover erdos_posa(const LabeledGraph& g, Vertex x, const Subgroup& sub, int r,
                       PackBudget budget = {});

/// The vertex-splitting gadget: one vertex per edge end, a clique of
/// identity edges on the ends at each vertex, and one matching edge per
/// original edge carrying its label.
struct SplitGadget {
    LabeledGraph graph;
    /// Ends at the chosen vertex x.
    VertexSet terminals;
    /// Gadget edge id -> original edge id, or -1 for clique edges.
    std::vector<int> original_edge;
};

/// Gadget vertex 2p is the tail end and 2p+1 the head end of the edge at
/// position p of g.
SplitGadget vertex_split_gadget(const LabeledGraph& g, Vertex x);

/// Canonical transitions of all branch trails of an immersion.
std::vector<Transition> immersion_transitions(const Immersion& im);

/// Transitions of the circuits in `sf` that are not transitions of `im`.
int foreign_transition_count(const SimpleFlower& sf, const std::vector<Transition>& im_transitions);

/// Number of branch trails sharing an edge with some circuit of `sf`.
int crossing_trail_count(const Immersion& im, const SimpleFlower& sf);

struct UncrossResult {
    SimpleFlower flower;
    int rewrites = 0;
    std::vector<int> potentials;
};

/// Rewrites `sf` until every branch trail that shares an edge with a
/// circuit holds the first or last edge of some circuit. Each rewrite lowers
/// the number of circuit transitions that are not transitions of `im`.
/// `pattern` must have a vertex incident to every edge.
UncrossResult uncross_flower(const LabeledGraph& g, const LabeledGraph& pattern, const Immersion& im,
                             const Subgroup& sub, const SimpleFlower& sf);

struct EnrichGrown {
    Subgroup subgroup;
    std::vector<Element> generators;
    LabeledGraph flower;
    Immersion immersion;
};

struct EnrichCovered {
    ShiftAssignment shift;
    std::vector<int> removed;
    VertexSet block;
};

struct EnrichStepResult {
    std::optional<EnrichGrown> grown;
    std::optional<EnrichCovered> covered;
    std::vector<std::string> audit;
};

/// One enrichment round. `pattern` is a (sub, 2k|G|, 2n)-generating flower
/// and `im` an immersion of it into g. `r` defaults to nk(|G|-1).
EnrichStepResult enrich_step(const LabeledGraph& g, const LabeledGraph& pattern, const Immersion& im,
                             const Subgroup& sub, int k, int n, std::optional<int> r = {},
                             PackBudget budget = {});

struct EnrichResult {
    /// Rich branch: the (G, k, n)-rich flower and its immersion into g.
    std::optional<LabeledGraph> rich;
    std::optional<Immersion> immersion;
    /// Cover branch.
    std::optional<Subgroup> subgroup;
    std::optional<EnrichCovered> covered;
    std::vector<Subgroup> chain;
    std::vector<std::string> audit;
};

/// floor(log2 m) for m >= 1.
int floor_log2(int m);

/// Drives extract_zero_flower, enrich_step and generating_to_rich from a
/// plain flower immersion with k' >= k|G|^(4+L) and n' >= n|G|.
EnrichResult enrich_flower(const LabeledGraph& g, const LabeledGraph& pattern, const Immersion& im,
                           int k, int n, PackBudget budget = {});

}  // namespace gammaforge
