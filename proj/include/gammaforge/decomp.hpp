#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gammaforge/conn.hpp"
#include "gammaforge/group.hpp"
#include "gammaforge/immerse.hpp"
#include "gammaforge/lgraph.hpp"
#include "gammaforge/pack.hpp"

namespace gammaforge {

/// (X, sigma) for the bag B over a proper subgroup.
struct Certificate {
    VertexSet bag;
    /// Edge ids, sorted.
    std::vector<int> edges;
    ShiftAssignment shift;
    Subgroup subgroup;
};

/// Empty when the certificate is valid for g, else the violated clause.
std::string certificate_problem(const LabeledGraph& g, const Certificate& c);

/// |delta(B)| + 2|X and E(B)|. Throws InvalidCertificate if invalid.
int certificate_value(const LabeledGraph& g, const Certificate& c);

struct SetValue {
    int value = 0;
    Certificate certificate;
};

/// Minimum certificate value of B over maximal subgroups and per-vertex
/// right-coset shifts. The witness shift is the identity outside B. Throws
/// NoProperSubgroup for the trivial group.
SetValue set_value(const LabeledGraph& g, const VertexSet& b);

struct TreeCutDecomposition {
    /// bags[i] is the bag of tree node i.
    std::vector<VertexSet> bags;
    std::vector<std::pair<int, int>> tree_edges;

    int node_count() const noexcept { return static_cast<int>(bags.size()); }
    bool operator==(const TreeCutDecomposition&) const = default;
};

/// Empty when d is a tree-cut decomposition of a graph on `vertex_count`
/// vertices.
std::string decomposition_problem(int vertex_count, const TreeCutDecomposition& d);

struct Torso {
    Multigraph graph;
    /// Torso vertex -> original vertex, or -1 for a new vertex.
    std::vector<Vertex> origin;
    /// Torso vertex -> tree node adjacent to the bag whose branch it
    /// represents, or -1 for bag vertices.
    std::vector<int> branch;
};

/// Bag vertices first (sorted), then one new vertex per tree neighbor in
/// increasing node order. Loops at new vertices are dropped.
Torso torso(const Multigraph& g, const TreeCutDecomposition& d, int node);

struct ContainerSystem {
    std::vector<VertexSet> containers;
    std::vector<VertexSet> target_cores;
};

/// Empty when every target core lies in a container.
std::string container_problem(const ContainerSystem& cs);

/// Index of a vertex of c fully connected to delta(c), or nullopt.
std::optional<Vertex> fully_connected_vertex(const Multigraph& g, const VertexSet& c);

struct RefineResult {
    ContainerSystem system;
    std::vector<int> values;
    int steps = 0;
    std::vector<std::string> log;
};

/// Drops nested containers, uncrosses overlapping pairs by posimodularity
/// and splits unrefined containers into minimum cuts around their cores,
/// until the system is pairwise disjoint and refined.
RefineResult refine_containers(const LabeledGraph& g, const ContainerSystem& initial, int t);

/// An inclusion-minimal set C containing s with |delta(C)| <= t. Vertices
/// outside s of degree > t are cut away first; if some survive and at most
/// `exhaustive_limit` vertices lie outside s, a smallest C avoiding all of
/// them is searched for exhaustively.
VertexSet minimal_cut_superset(const Multigraph& g, const VertexSet& s, int t, int exhaustive_limit = 16);

/// Recursive contraction. `containers` must be refined, pairwise disjoint,
/// and hold every t-core of more than n vertices. Node 0 is the root.
TreeCutDecomposition build_tree_cut(const Multigraph& g, const ContainerSystem& containers, int t, int n);

enum class BagOutcome { Neither = 0, FewHighDegree = 1, Certified = 2 };

const char* to_string(BagOutcome o) noexcept;

struct BagReport {
    int node = 0;
    BagOutcome outcome = BagOutcome::Neither;
    /// Bag vertices whose torso degree exceeds t.
    std::vector<Vertex> high_degree;
    /// Tree neighbors whose new vertex has torso degree above t.
    std::vector<int> heavy_branches;
    /// Best certificate under the given shift, when one has value <= t.
    std::optional<Certificate> certificate;
    /// Lowest value seen under the given shift (-1 if none computed).
    int value = -1;
    std::string detail;
};

struct StructureReport {
    bool ok = false;
    std::vector<BagReport> bags;
};

/// Checks every bag for outcome 1 (at most n torso vertices above t, no
/// heavy new vertex) or outcome 2 (a certificate of value <= t under
/// `shift`). Throws Structural if d is not a tree-cut decomposition.
StructureReport verify_structure(const LabeledGraph& g, const ShiftAssignment& shift,
                                 const TreeCutDecomposition& d, int t, int n);

/// 4kn|G|^(6 + floor(log2 |G|)); nullopt on overflow.
std::optional<long long> theorem_t(int group_order, int k, int n);

struct RichWitness {
    LabeledGraph flower;
    Immersion immersion;
};

struct CoreCertificate {
    std::optional<Certificate> certificate;
    int value = 0;
    std::optional<RichWitness> rich;
    std::vector<std::string> audit;
};

/// Flower from the core, enriched; on the cover branch the certificate for
/// the edge-block of G minus X holding the branch center.
CoreCertificate core_certificate(const LabeledGraph& g, const VertexSet& s, int k, int n, int t,
                                 PackBudget budget = {});

/// Some B containing s with val(B) <= t: candidates from cut shrinking and
/// V(G), then exhaustive over supersets when at most `exhaustive_limit`
/// vertices lie outside s.
std::optional<SetValue> find_container(const LabeledGraph& g, const VertexSet& s, int t,
                                       int exhaustive_limit = 10);

struct DecomposeOptions {
    int k = 1;
    int n = 1;
    std::optional<int> override_t;
    /// Outcome-1 bound; defaults to n|G|.
    std::optional<int> outcome_bound;
    PackBudget budget;
};

struct DecomposeResult {
    ShiftAssignment shift;
    TreeCutDecomposition tree;
    std::vector<BagOutcome> outcomes;
    int t = 0;
    /// nullopt when the formula overflows.
    std::optional<long long> theorem_t;
    bool t_overridden = false;
    int outcome_bound = 0;
    ContainerSystem containers;
    std::optional<RichWitness> rich;
    std::vector<std::string> notes;
};

/// t-cores, containers, refinement, tree-cut construction and shift merge.
/// Returns the rich witness instead when a core yields one.
DecomposeResult structure_decompose(const LabeledGraph& g, const DecomposeOptions& opts);

/// verify_structure at (t, n), then forbids(g, rich (G, t+1, n)-flower).
/// Throws Precondition when the decomposition does not verify.
Tri check_converse(const LabeledGraph& g, const ShiftAssignment& shift, const TreeCutDecomposition& d,
                   int t, int n, SearchBudget budget = {});

/// Graphviz rendering of the tree with bag annotations.
std::string to_dot(const LabeledGraph& g, const TreeCutDecomposition& d,
                   const std::vector<BagOutcome>& outcomes = {});

}  // namespace gammaforge
