#pragma once

#include <optional>
#include <vector>

#include "gammaforge/immerse.hpp"
#include "gammaforge/lgraph.hpp"

namespace gammaforge {

enum class FlowerKind { Plain, Rich, Generating };

const char* to_string(FlowerKind kind) noexcept;

struct FlowerSpec {
    FlowerKind kind = FlowerKind::Plain;
    int k = 1;
    int n = 1;
    /// Plain flowers fall back to the trivial group when this is null.
    GroupPtr group;
    /// Generator set; must contain the identity and generate the group, or
    /// `over` when that is given.
    std::vector<Element> generators;
    std::optional<Subgroup> over;
};

/// Builds the flower. Vertex 0 is the center "x", vertex i is petal "yi".
/// Edges are stored center -> petal, grouped by petal, then by label in
/// increasing element order, then by copy; ids are 0, 1, 2, ...
LabeledGraph build_flower(const FlowerSpec& spec);

/// Shape of a graph that is a (k, n)-flower.
struct FlowerLayout {
    Vertex center = 0;
    std::vector<Vertex> petals;
    int multiplicity = 0;
    /// bundles[i]: edge positions between the center and petals[i], in order.
    std::vector<std::vector<int>> bundles;
};

/// Recognizes a (k, n)-flower with n >= 1. A vertex named "x" is preferred
/// as center; otherwise the lowest-index vertex incident to every edge.
/// Petals are listed by vertex index.
std::optional<FlowerLayout> flower_layout(const LabeledGraph& f);

/// Label of the edge at `pos` read from the center outwards.
Element outward_label(const LabeledGraph& f, const FlowerLayout& layout, int pos);

/// The branch trail of pattern edge `pos`, oriented to start at the image of
/// the pattern's center.
Trail outward_trail(const LabeledGraph& pattern, const FlowerLayout& layout, const Immersion& im,
                    int pos);

/// Number of edges incident to v, loops counted twice.
int incidences(const LabeledGraph& h, Vertex v);

/// Immersion of `h` into the rich flower `rich` (as built by build_flower):
/// vertex i goes to petal i+1 and each edge becomes an identity edge into
/// the center followed by an edge carrying the pattern label. Requires every
/// vertex of h to have at most `k` incidences.
Immersion embed_into_rich_flower(const LabeledGraph& rich, int k, const LabeledGraph& h);

/// Immersion of the (G, k, n)-rich flower `rich` into the generating flower
/// `gflower`, which must carry k|G|^2 parallel edges per (petal, generator).
Immersion generating_to_rich(const LabeledGraph& gflower, const LabeledGraph& rich, int k);

struct ZeroFlower {
    /// The ({1}, k, n)-rich flower, as a graph over the input's group.
    LabeledGraph flower;
    /// Immersion of `flower` into the input; its shift is the per-petal
    /// majority label.
    Immersion immersion;
};

/// For a graph whose underlying graph is a (k|G|, n)-flower: shifts each
/// petal by its most common outward label (ties to the lowest element) and
/// selects k identity edges per petal.
ZeroFlower extract_zero_flower(const LabeledGraph& f, int k);

/// Immersion of the flower `small` into the flower `big` mapping center to
/// center, petal i to petal i, and each edge to the lowest unused edge of
/// the same petal and outward label.
Immersion sub_flower(const LabeledGraph& big, const LabeledGraph& small);

/// Plain (k, n)-flower immersion into `g` with every branch vertex in `s`,
/// found by routing k trails per petal to a candidate center with one
/// max-flow. Needs |s| > n and s pairwise kn-edge-connected. The returned
/// immersion is for build_flower({Plain, k, n, g.group()}) and verifies with
/// labels ignored.
Immersion flower_from_core(const LabeledGraph& g, const VertexSet& s, int k, int n);

}  // namespace gammaforge
