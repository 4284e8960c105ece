#include "gammaforge/flower.hpp"

#include <algorithm>
#include <map>

#include "gammaforge/conn.hpp"
#include "gammaforge/error.hpp"

namespace gammaforge {

const char* to_string(FlowerKind kind) noexcept {
    switch (kind) {
    case FlowerKind::Plain: return "plain";
    case FlowerKind::Rich: return "rich";
    case FlowerKind::Generating: return "generating";
    }
    return "plain";
}

LabeledGraph build_flower(const FlowerSpec& spec) {
    require(spec.k >= 1 && spec.n >= 1, ErrorCode::InvalidParameter, "flower needs k >= 1 and n >= 1");
    GroupPtr group = spec.group ? spec.group : make_cyclic(1);
    const FiniteGroup& G = *group;
    std::vector<Element> labels;
    switch (spec.kind) {
    case FlowerKind::Plain:
        labels = {G.identity()};
        break;
    case FlowerKind::Rich:
        for (Element a = 0; a < G.order(); ++a) labels.push_back(a);
        break;
    case FlowerKind::Generating: {
        for (Element a : spec.generators)
            require(G.contains(a), ErrorCode::InvalidParameter, "generator outside the group");
        labels = normalized(spec.generators);
        require(std::binary_search(labels.begin(), labels.end(), G.identity()),
                ErrorCode::InvalidParameter, "generator set must contain the identity");
        Subgroup spanned = generate_subgroup(group, labels);
        if (spec.over)
            require(spanned == *spec.over, ErrorCode::InvalidParameter,
                    "generator set does not generate the given subgroup");
        else
            require(spanned.size() == G.order(), ErrorCode::InvalidParameter,
                    "generator set does not generate the group");
        break;
    }
    }
    std::vector<std::string> names{"x"};
    for (int i = 1; i <= spec.n; ++i) names.push_back("y" + std::to_string(i));
    std::vector<Edge> edges;
    for (int i = 1; i <= spec.n; ++i)
        for (Element a : labels)
            for (int c = 0; c < spec.k; ++c)
                edges.push_back({static_cast<int>(edges.size()), 0, i, a});
    return LabeledGraph(group, std::move(names), std::move(edges));
}

namespace {

std::optional<FlowerLayout> layout_with_center(const LabeledGraph& f, Vertex x) {
    FlowerLayout out;
    out.center = x;
    std::map<Vertex, std::vector<int>> by_petal;
    for (int p = 0; p < f.edge_count(); ++p) {
        const Edge& e = f.edges()[p];
        if (e.is_loop()) return std::nullopt;
        if (e.tail != x && e.head != x) return std::nullopt;
        by_petal[e.tail == x ? e.head : e.tail].push_back(p);
    }
    if (static_cast<int>(by_petal.size()) != f.vertex_count() - 1 || by_petal.empty()) return std::nullopt;
    for (auto& [v, bundle] : by_petal) {
        if (out.multiplicity == 0) out.multiplicity = static_cast<int>(bundle.size());
        if (static_cast<int>(bundle.size()) != out.multiplicity) return std::nullopt;
        out.petals.push_back(v);
        out.bundles.push_back(std::move(bundle));
    }
    return out;
}

}  // namespace

std::optional<FlowerLayout> flower_layout(const LabeledGraph& f) {
    if (f.vertex_count() < 2) return std::nullopt;
    if (auto x = f.find_vertex("x"))
        if (auto l = layout_with_center(f, *x)) return l;
    for (Vertex v = 0; v < f.vertex_count(); ++v)
        if (auto l = layout_with_center(f, v)) return l;
    return std::nullopt;
}

Element outward_label(const LabeledGraph& f, const FlowerLayout& layout, int pos) {
    const Edge& e = f.edges().at(pos);
    return e.tail == layout.center ? e.label : f.G().inv(e.label);
}

Trail outward_trail(const LabeledGraph& pattern, const FlowerLayout& layout, const Immersion& im,
                    int pos) {
    const Edge& e = pattern.edges().at(pos);
    return e.tail == layout.center ? im.trails.at(pos) : inverse(im.trails.at(pos));
}

int incidences(const LabeledGraph& h, Vertex v) {
    int c = 0;
    for (const Edge& e : h.edges()) c += (e.tail == v) + (e.head == v);
    return c;
}

namespace {

// Hands out the lowest unused edge of each (petal, outward label) class.
class EdgePool {
public:
    EdgePool(const LabeledGraph& f, const FlowerLayout& layout) : f_(f), layout_(layout) {
        used_.assign(f.edge_count(), 0);
    }

    /// Position of a fresh edge at petal index i (0-based) with the given
    /// outward label, or -1.
    int take(int i, Element label) {
        for (int p : layout_.bundles.at(i))
            if (!used_[p] && outward_label(f_, layout_, p) == label) {
                used_[p] = 1;
                return p;
            }
        return -1;
    }

    /// Step crossing edge `p` from the center outwards (or back if !out).
    OrientedEdge step(int p, bool out) const {
        const Edge& e = f_.edges()[p];
        bool forward = (e.tail == layout_.center) == out;
        return {e.id, forward};
    }

private:
    const LabeledGraph& f_;
    const FlowerLayout& layout_;
    std::vector<char> used_;
};

FlowerLayout require_layout(const LabeledGraph& f, const char* what) {
    auto l = flower_layout(f);
    require(l.has_value(), ErrorCode::Precondition, std::string(what) + " is not a flower");
    return *l;
}

}  // namespace

Immersion embed_into_rich_flower(const LabeledGraph& rich, int k, const LabeledGraph& h) {
    require(rich.G() == h.G(), ErrorCode::InvalidParameter, "pattern and rich flower differ in group");
    FlowerLayout layout = require_layout(rich, "rich flower");
    require(static_cast<int>(layout.petals.size()) >= h.vertex_count(), ErrorCode::Precondition,
            "pattern has more vertices than the flower has petals");
    for (Vertex v = 0; v < h.vertex_count(); ++v)
        require(incidences(h, v) <= k, ErrorCode::Precondition,
                "vertex " + h.vertex_name(v) + " has more than " + std::to_string(k) + " incidences");
    EdgePool pool(rich, layout);
    Immersion im;
    for (Vertex v = 0; v < h.vertex_count(); ++v) im.vertex_map.push_back(layout.petals[v]);
    for (const Edge& e : h.edges()) {
        int in = pool.take(e.tail, rich.G().identity());
        require(in >= 0, ErrorCode::Precondition, "rich flower ran out of identity edges");
        int out = pool.take(e.head, e.label);
        require(out >= 0, ErrorCode::Precondition, "rich flower ran out of edges with the pattern label");
        im.trails.push_back(Trail{{pool.step(in, false), pool.step(out, true)}});
    }
    im.shift = identity_shift(rich);
    return im;
}

Immersion generating_to_rich(const LabeledGraph& gflower, const LabeledGraph& rich, int k) {
    require(gflower.G() == rich.G(), ErrorCode::InvalidParameter, "flowers differ in group");
    const FiniteGroup& G = gflower.G();
    FlowerLayout gl = require_layout(gflower, "generating flower");
    FlowerLayout rl = require_layout(rich, "rich flower");
    require(gl.petals.size() >= rl.petals.size(), ErrorCode::Precondition,
            "generating flower has fewer petals than the target");

    std::vector<Element> gens;
    for (int p : gl.bundles[0]) gens.push_back(outward_label(gflower, gl, p));
    gens = normalized(gens);
    const long need = static_cast<long>(k) * G.order() * G.order();
    for (std::size_t i = 0; i < gl.petals.size(); ++i)
        for (Element s : gens) {
            long c = std::count_if(gl.bundles[i].begin(), gl.bundles[i].end(),
                                   [&](int p) { return outward_label(gflower, gl, p) == s; });
            require(c >= need, ErrorCode::Precondition,
                    "generating flower has multiplicity " + std::to_string(c) + " < k|G|^2 = " +
                        std::to_string(need));
        }
    std::vector<Element> letters;
    for (Element s : gens)
        if (s != G.identity()) letters.push_back(s);

    EdgePool pool(gflower, gl);
    Immersion im;
    im.vertex_map.assign(rich.vertex_count(), -1);
    im.vertex_map[rl.center] = gl.center;
    for (std::size_t i = 0; i < rl.petals.size(); ++i) im.vertex_map[rl.petals[i]] = gl.petals[i];
    im.trails.resize(rich.edge_count());
    for (std::size_t i = 0; i < rl.petals.size(); ++i)
        for (int p : rl.bundles[i]) {
            Element target = outward_label(rich, rl, p);
            Trail t;
            if (target == G.identity()) {
                t.steps.push_back(pool.step(pool.take(static_cast<int>(i), G.identity()), true));
            } else {
                std::vector<Element> word = word_over_generators(gflower.group(), letters, target);
                for (std::size_t j = 0; j < word.size(); ++j) {
                    if (j > 0) t.steps.push_back(pool.step(pool.take(static_cast<int>(i), G.identity()), false));
                    t.steps.push_back(pool.step(pool.take(static_cast<int>(i), word[j]), true));
                }
            }
            bool from_center = rich.edges()[p].tail == rl.center;
            im.trails[p] = from_center ? t : inverse(t);
        }
    im.shift = identity_shift(gflower);
    return im;
}

ZeroFlower extract_zero_flower(const LabeledGraph& f, int k) {
    FlowerLayout layout = require_layout(f, "input");
    const FiniteGroup& G = f.G();
    require(k >= 1 && layout.multiplicity >= k * G.order(), ErrorCode::Precondition,
            "petal multiplicity " + std::to_string(layout.multiplicity) + " is below k|G|");
    const int n = static_cast<int>(layout.petals.size());
    ZeroFlower out;
    out.flower = build_flower({FlowerKind::Plain, k, n, f.group(), {}, {}});
    Immersion& im = out.immersion;
    im.shift = identity_shift(f);
    im.vertex_map.assign(n + 1, -1);
    im.vertex_map[0] = layout.center;
    im.trails.resize(out.flower.edge_count());
    for (int i = 0; i < n; ++i) {
        std::vector<int> count(G.order(), 0);
        for (int p : layout.bundles[i]) count[outward_label(f, layout, p)]++;
        Element alpha = static_cast<Element>(std::max_element(count.begin(), count.end()) - count.begin());
        im.shift[layout.petals[i]] = alpha;
        im.vertex_map[i + 1] = layout.petals[i];
        int taken = 0;
        for (int p : layout.bundles[i]) {
            if (taken == k) break;
            if (outward_label(f, layout, p) != alpha) continue;
            const Edge& e = f.edges()[p];
            im.trails[i * k + taken] = Trail{{{e.id, e.tail == layout.center}}};
            ++taken;
        }
    }
    return out;
}

Immersion sub_flower(const LabeledGraph& big, const LabeledGraph& small) {
    FlowerLayout bl = require_layout(big, "host flower");
    FlowerLayout sl = require_layout(small, "pattern flower");
    require(sl.petals.size() <= bl.petals.size(), ErrorCode::Precondition, "pattern flower has too many petals");
    EdgePool pool(big, bl);
    Immersion im;
    im.vertex_map.assign(small.vertex_count(), -1);
    im.vertex_map[sl.center] = bl.center;
    for (std::size_t i = 0; i < sl.petals.size(); ++i) im.vertex_map[sl.petals[i]] = bl.petals[i];
    im.trails.resize(small.edge_count());
    for (std::size_t i = 0; i < sl.petals.size(); ++i)
        for (int p : sl.bundles[i]) {
            int q = pool.take(static_cast<int>(i), outward_label(small, sl, p));
            require(q >= 0, ErrorCode::Precondition,
                    "host flower lacks an edge with outward label " +
                        std::to_string(outward_label(small, sl, p)) + " at petal " + std::to_string(i + 1));
            Trail t{{pool.step(q, true)}};
            im.trails[p] = small.edges()[p].tail == sl.center ? t : inverse(t);
        }
    im.shift = identity_shift(big);
    return im;
}

Immersion flower_from_core(const LabeledGraph& g, const VertexSet& s_in, int k, int n) {
    require(k >= 1 && n >= 1, ErrorCode::InvalidParameter, "flower needs k >= 1 and n >= 1");
    VertexSet s = normalized(s_in);
    for (Vertex v : s) require(g.has_vertex(v), ErrorCode::InvalidParameter, "core vertex out of range");
    require(static_cast<int>(s.size()) > n, ErrorCode::Precondition,
            "core has " + std::to_string(s.size()) + " vertices, needs more than n = " + std::to_string(n));
    Multigraph m = g.underlying();
    std::vector<Vertex> order = s;
    std::stable_sort(order.begin(), order.end(),
                     [&](Vertex a, Vertex b) { return degree(m, a) > degree(m, b); });

    for (Vertex center : order) {
        std::vector<Vertex> petals;
        for (Vertex v : order)
            if (v != center && static_cast<int>(petals.size()) < n) petals.push_back(v);
        std::vector<std::pair<Vertex, int>> supply{{center, k * n}};
        std::vector<std::pair<Vertex, int>> demand;
        for (Vertex p : petals) demand.emplace_back(p, k);
        RoutedWalks routed = route_trails(m, supply, demand, k * n);
        if (routed.value < k * n) continue;

        Immersion im;
        im.vertex_map.push_back(center);
        im.vertex_map.insert(im.vertex_map.end(), petals.begin(), petals.end());
        im.trails.resize(static_cast<std::size_t>(k) * n);
        std::vector<int> filled(n, 0);
        for (std::size_t w = 0; w < routed.walks.size(); ++w) {
            int i = static_cast<int>(std::find(petals.begin(), petals.end(), routed.ends[w]) - petals.begin());
            require(i < n && filled[i] < k, ErrorCode::Internal, "flow routed to an unexpected petal");
            im.trails[i * k + filled[i]++] = to_trail(g, routed.walks[w]);
        }
        im.shift = identity_shift(g);
        im.audit.push_back("flower_from_core: center " + g.vertex_name(center) + ", " +
                           std::to_string(n) + " petals of multiplicity " + std::to_string(k));
        return im;
    }
    fail(ErrorCode::Precondition, "no vertex of the core routes " + std::to_string(k * n) +
                                      " edge-disjoint trails to n = " + std::to_string(n) + " petals");
}

}  // namespace gammaforge
