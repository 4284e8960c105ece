#include "gammaforge/pack.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gammaforge/conn.hpp"
#include "gammaforge/error.hpp"

namespace gammaforge {

namespace {

bool usable_at(std::span<const char> usable, int p) { return usable.empty() || usable[p] != 0; }

std::string describe(const Trail& t) {
    std::string s;
    for (OrientedEdge e : t.steps) {
        if (!s.empty()) s += ' ';
        s += (e.forward ? "+" : "-") + std::to_string(e.edge);
    }
    return s;
}

Walk reversed_walk(const Walk& w) {
    Walk r;
    for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(it->reversed());
    return r;
}

void require_proper(const Subgroup& sub) {
    require(sub.is_proper(), ErrorCode::InvalidParameter,
            "the subgroup is the whole group, so no circuit can be labeled outside it");
}

// Shift assignment from the ear-by-ear relabeling of x's edge-block, or the
// circuit that shows some ear cannot be relabeled into the subgroup.
struct BlockLabeling {
    ShiftAssignment sigma;
    VertexSet block;
    std::optional<Trail> witness;
};

BlockLabeling label_block(const LabeledGraph& g, Vertex x, const Subgroup& sub, std::span<const char> usable) {
    require(g.has_vertex(x), ErrorCode::InvalidParameter, "center vertex out of range");
    require(sub.parent() && *sub.parent() == g.G(), ErrorCode::InvalidParameter,
            "subgroup belongs to a different group");
    const FiniteGroup& G = g.G();
    Multigraph m = g.underlying();
    BlockLabeling out;
    out.sigma = identity_shift(g);

    std::vector<char> keep(m.edge_count(), 0);
    for (int p = 0; p < m.edge_count(); ++p) keep[p] = usable_at(usable, p);
    for (int p : bridges(m, keep)) keep[p] = 0;
    auto blocks = components(m, keep);
    out.block = blocks[block_of(blocks, x)];
    auto in_block = membership(out.block, m.vertex_count);
    for (int p = 0; p < m.edge_count(); ++p)
        if (keep[p] && !(in_block[m.edges[p].first] && in_block[m.edges[p].second])) keep[p] = 0;
    if (std::none_of(keep.begin(), keep.end(), [](char c) { return c != 0; })) return out;

    InducedSubgraph sub_graph = induced(m, out.block, keep);
    const Multigraph& h = sub_graph.graph;
    Vertex lx = static_cast<Vertex>(std::find(sub_graph.to_parent.begin(), sub_graph.to_parent.end(), x) -
                                    sub_graph.to_parent.begin());
    auto start = cycle_through(h, lx);
    require(start.has_value(), ErrorCode::Internal, "edge-block without a cycle through its vertex");
    EarDecomposition ears = ear_decomposition(h, start);

    auto label_of = [&](OrientedEdge s) {
        const Edge& e = g.edges()[sub_graph.edge_to_parent[s.edge]];
        return s.forward ? e.label : G.inv(e.label);
    };
    auto to_parent_trail = [&](const Walk& w) {
        Trail t;
        for (OrientedEdge s : w) t.steps.push_back({g.edges()[sub_graph.edge_to_parent[s.edge]].id, s.forward});
        return t;
    };

    std::vector<Element> sigma(h.vertex_count, -1);
    sigma[lx] = G.identity();
    std::vector<char> covered(h.edge_count(), 0);
    for (std::size_t k = 0; k < ears.ears.size(); ++k) {
        const Walk& ear = ears.ears[k];
        for (std::size_t i = 0; i + 1 < ear.size(); ++i) {
            Vertex a = walk_tail(h, Walk{ear[i]}), b = walk_head(h, Walk{ear[i]});
            sigma[b] = G.mul(sigma[a], label_of(ear[i]));
        }
        Vertex a = walk_tail(h, Walk{ear.back()}), b = walk_head(h, Walk{ear.back()});
        Element last = G.mul(G.mul(sigma[a], label_of(ear.back())), G.inv(sigma[b]));
        if (!sub.contains(last)) {
            // Close the ear into a circuit at x through two edge-disjoint
            // routes in the earlier ears, whose labels all lie in the subgroup.
            Vertex u = walk_tail(h, ear), v = walk_head(h, ear);
            Walk circuit;
            if (k == 0 || (u == lx && v == lx)) {
                circuit = ear;
            } else {
                std::vector<char> earlier(covered.begin(), covered.end());
                std::vector<std::pair<Vertex, int>> supply, demand;
                if (u != lx) supply.emplace_back(u, 1);
                if (v != lx) {
                    if (v == u) supply.back().second = 2;
                    else supply.emplace_back(v, 1);
                }
                int need = 0;
                for (auto& [_, c] : supply) need += c;
                demand.emplace_back(lx, need);
                RoutedWalks routes = route_trails(h, supply, demand, need, earlier);
                require(routes.value == need, ErrorCode::Internal, "earlier ears are not 2-edge-connected");
                Walk ru, rv;
                bool have_u = false;
                for (std::size_t w = 0; w < routes.walks.size(); ++w) {
                    if (u != lx && routes.starts[w] == u && !have_u) {
                        ru = routes.walks[w];
                        have_u = true;
                    } else {
                        rv = routes.walks[w];
                    }
                }
                circuit = reversed_walk(ru);
                circuit.insert(circuit.end(), ear.begin(), ear.end());
                circuit.insert(circuit.end(), rv.begin(), rv.end());
            }
            Trail t = to_parent_trail(circuit);
            require(is_circuit(g, t) && trail_tail(g, t) == x && !sub.contains(trail_label(g, t)),
                    ErrorCode::Internal, "witness circuit construction failed");
            out.witness = t;
            return out;
        }
        for (OrientedEdge s : ear) covered[s.edge] = 1;
    }
    for (Vertex lv = 0; lv < h.vertex_count; ++lv) out.sigma[sub_graph.to_parent[lv]] = sigma[lv];
    return out;
}

std::vector<char> mask_without(int edge_count, const LabeledGraph& g, std::span<const int> removed_ids) {
    std::vector<char> keep(edge_count, 1);
    for (int id : removed_ids) {
        int p = g.position(id);
        if (p >= 0) keep[p] = 0;
    }
    return keep;
}

}  // namespace

std::string simple_flower_problem(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                  const SimpleFlower& sf) {
    if (sf.center != x) return "flower center differs from x";
    std::set<int> seen;
    for (std::size_t i = 0; i < sf.circuits.size(); ++i) {
        const Trail& c = sf.circuits[i];
        std::string p = trail_problem(g, c);
        if (!p.empty()) return "circuit " + std::to_string(i) + ": " + p;
        if (trail_tail(g, c) != x || trail_head(g, c) != x)
            return "circuit " + std::to_string(i) + " does not begin and end at x";
        if (sub.contains(trail_label(g, c)))
            return "circuit " + std::to_string(i) + " is labeled inside the subgroup";
        for (OrientedEdge s : c.steps)
            if (!seen.insert(s.edge).second)
                return "circuit " + std::to_string(i) + " shares edge " + std::to_string(s.edge);
    }
    return {};
}

std::vector<Trail> enumerate_qualifying_circuits(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                                 std::span<const char> usable, std::uint64_t max_nodes) {
    require(g.has_vertex(x), ErrorCode::InvalidParameter, "center vertex out of range");
    const FiniteGroup& G = g.G();
    Multigraph m = g.underlying();
    auto inc = m.incidence();
    std::vector<char> used(m.edge_count(), 0);
    std::vector<Trail> out;
    Walk w;
    std::uint64_t nodes = 0;

    auto dfs = [&](auto&& self, Vertex at, Element lbl) -> void {
        if (++nodes > max_nodes) fail(ErrorCode::BudgetExceeded, "circuit enumeration exceeded its budget");
        if (!w.empty() && at == x && !sub.contains(lbl)) {
            Trail t = to_trail(g, w);
            if (t <= inverse(t)) out.push_back(std::move(t));
        }
        for (int p : inc[at]) {
            if (used[p] || !usable_at(usable, p)) continue;
            const auto& [a, b] = m.edges[p];
            for (int dir = 0; dir < 2; ++dir) {
                bool forward = dir == 0;
                if ((forward ? a : b) != at) continue;
                used[p] = 1;
                w.push_back({p, forward});
                self(self, forward ? b : a, G.mul(lbl, g.label({g.edges()[p].id, forward})));
                w.pop_back();
                used[p] = 0;
            }
        }
    };
    dfs(dfs, x, G.identity());
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Trail> find_qualifying_circuit(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                             std::span<const char> usable) {
    return label_block(g, x, sub, usable).witness;
}

ShiftAssignment relabel_edge_block(const LabeledGraph& g, Vertex x, const Subgroup& sub) {
    BlockLabeling res = label_block(g, x, sub, {});
    if (res.witness)
        fail(ErrorCode::Precondition,
             "a circuit at " + g.vertex_name(x) + " is labeled outside the subgroup: " + describe(*res.witness));
    return res.sigma;
}

std::optional<SimpleFlower> find_simple_flower(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                               int r, PackBudget budget) {
    require(r >= 1, ErrorCode::InvalidParameter, "r must be positive");
    require_proper(sub);
    // Greedy first: a witness circuit at a time, removing its edges.
    {
        std::vector<char> keep(g.edge_count(), 1);
        SimpleFlower sf{x, {}};
        while (static_cast<int>(sf.circuits.size()) < r) {
            auto c = find_qualifying_circuit(g, x, sub, keep);
            if (!c) break;
            for (OrientedEdge s : c->steps) keep[g.position(s.edge)] = 0;
            sf.circuits.push_back(*c);
        }
        if (static_cast<int>(sf.circuits.size()) == r) return sf;
    }
    // Exact: one circuit per edge set, then a disjoint selection.
    std::vector<Trail> all = enumerate_qualifying_circuits(g, x, sub, {}, budget.max_nodes);
    std::map<std::vector<int>, Trail> by_edges;
    for (const Trail& t : all) {
        std::vector<int> ids;
        for (OrientedEdge s : t.steps) ids.push_back(s.edge);
        std::sort(ids.begin(), ids.end());
        by_edges.emplace(std::move(ids), t);
    }
    std::vector<std::vector<int>> sets;
    std::vector<const Trail*> reps;
    for (const auto& [ids, t] : by_edges) {
        sets.push_back(ids);
        reps.push_back(&t);
    }
    std::vector<char> taken(g.next_edge_id(), 0);
    std::vector<int> chosen;
    std::uint64_t nodes = 0;
    auto dfs = [&](auto&& self, std::size_t from) -> bool {
        if (static_cast<int>(chosen.size()) == r) return true;
        if (++nodes > budget.max_nodes) fail(ErrorCode::BudgetExceeded, "packing search exceeded its budget");
        if (sets.size() - from < static_cast<std::size_t>(r) - chosen.size()) return false;
        for (std::size_t i = from; i < sets.size(); ++i) {
            if (std::any_of(sets[i].begin(), sets[i].end(), [&](int id) { return taken[id] != 0; })) continue;
            for (int id : sets[i]) taken[id] = 1;
            chosen.push_back(static_cast<int>(i));
            if (self(self, i + 1)) return true;
            chosen.pop_back();
            for (int id : sets[i]) taken[id] = 0;
        }
        return false;
    };
    if (!dfs(dfs, 0)) return std::nullopt;
    SimpleFlower sf{x, {}};
    for (int i : chosen) sf.circuits.push_back(*reps[i]);
    return sf;
}

std::optional<std::vector<int>> find_cover(const LabeledGraph& g, Vertex x, const Subgroup& sub,
                                           int max_size, PackBudget budget) {
    require_proper(sub);
    std::vector<char> keep(g.edge_count(), 1);
    std::vector<int> removed;
    std::uint64_t nodes = 0;
    auto search = [&](auto&& self, int size) -> bool {
        if (++nodes > budget.max_nodes) fail(ErrorCode::BudgetExceeded, "cover search exceeded its budget");
        auto c = find_qualifying_circuit(g, x, sub, keep);
        if (!c) return true;
        if (static_cast<int>(removed.size()) == size) return false;
        // Some edge of this circuit has to go.
        for (OrientedEdge s : c->steps) {
            int p = g.position(s.edge);
            keep[p] = 0;
            removed.push_back(s.edge);
            if (self(self, size)) return true;
            removed.pop_back();
            keep[p] = 1;
        }
        return false;
    };
    for (int size = 0; size <= max_size; ++size)
        if (search(search, size)) {
            std::sort(removed.begin(), removed.end());
            return removed;
        }
    return std::nullopt;
}

PackOrCover erdos_posa(const LabeledGraph& g, Vertex x, const Subgroup& sub, int r, PackBudget budget) {
    require(r >= 1, ErrorCode::InvalidParameter, "r must be positive");
    require(g.has_vertex(x), ErrorCode::InvalidParameter, "center vertex out of range");
    require_proper(sub);
    PackOrCover out;
    auto& log = out.transcript;
    auto certify_packing = [&](SimpleFlower sf) {
        std::string p = simple_flower_problem(g, x, sub, sf);
        require(p.empty(), ErrorCode::Internal, "packing failed certification: " + p);
        log.push_back("packing of " + std::to_string(r) + " circuits certified: pairwise edge-disjoint, "
                      "each begins at x with label outside the subgroup");
        out.packing = std::move(sf);
    };
    auto certify_cover = [&](std::vector<int> cover) {
        auto keep = mask_without(g.edge_count(), g, cover);
        require(!find_qualifying_circuit(g, x, sub, keep), ErrorCode::Internal, "cover failed certification");
        std::string how = "ear-decomposition relabeling of the edge-block";
        try {
            auto rest = enumerate_qualifying_circuits(g, x, sub, keep, budget.max_nodes);
            require(rest.empty(), ErrorCode::Internal, "cover failed enumeration check");
            how += " and exhaustive circuit enumeration";
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BudgetExceeded) throw;
        }
        log.push_back("cover of " + std::to_string(cover.size()) + " edges (bound " + std::to_string(2 * r - 2) +
                      ") certified by " + how);
        out.cover = std::move(cover);
    };

    SimpleFlower greedy{x, {}};
    {
        std::vector<char> keep(g.edge_count(), 1);
        while (static_cast<int>(greedy.circuits.size()) < r) {
            auto c = find_qualifying_circuit(g, x, sub, keep);
            if (!c) break;
            for (OrientedEdge s : c->steps) keep[g.position(s.edge)] = 0;
            greedy.circuits.push_back(*c);
        }
    }
    log.push_back("greedy packing found " + std::to_string(greedy.circuits.size()) + " of " + std::to_string(r));
    if (static_cast<int>(greedy.circuits.size()) == r) {
        certify_packing(std::move(greedy));
        return out;
    }
    // A cover smaller than r meets any r disjoint circuits in r distinct
    // edges, so it rules out a packing.
    if (auto cover = find_cover(g, x, sub, r - 1, budget)) {
        log.push_back("cover of size " + std::to_string(cover->size()) + " < r rules out a packing");
        certify_cover(std::move(*cover));
        return out;
    }
    if (auto sf = find_simple_flower(g, x, sub, r, budget)) {
        log.push_back("exhaustive packing search succeeded");
        certify_packing(std::move(*sf));
        return out;
    }
    log.push_back("exhaustive packing search: no " + std::to_string(r) + " disjoint qualifying circuits");
    for (int size = r; size <= 2 * r - 2; ++size) {
        if (auto cover = find_cover(g, x, sub, size, budget)) {
            certify_cover(std::move(*cover));
            return out;
        }
    }
    fail(ErrorCode::Internal, "neither a packing nor a cover of size at most 2r-2 was found");
}

SplitGadget vertex_split_gadget(const LabeledGraph& g, Vertex x) {
    require(g.has_vertex(x), ErrorCode::InvalidParameter, "vertex out of range");
    const int m = g.edge_count();
    std::vector<std::string> names;
    for (const Edge& e : g.edges()) {
        names.push_back("e" + std::to_string(e.id) + ".t");
        names.push_back("e" + std::to_string(e.id) + ".h");
    }
    std::vector<Edge> edges;
    SplitGadget out;
    for (int p = 0; p < m; ++p) {
        edges.push_back({static_cast<int>(edges.size()), 2 * p, 2 * p + 1, g.edges()[p].label});
        out.original_edge.push_back(g.edges()[p].id);
    }
    std::vector<std::vector<Vertex>> ends(g.vertex_count());
    for (int p = 0; p < m; ++p) {
        ends[g.edges()[p].tail].push_back(2 * p);
        ends[g.edges()[p].head].push_back(2 * p + 1);
    }
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        std::sort(ends[v].begin(), ends[v].end());
        for (std::size_t i = 0; i < ends[v].size(); ++i)
            for (std::size_t j = i + 1; j < ends[v].size(); ++j) {
                edges.push_back({static_cast<int>(edges.size()), ends[v][i], ends[v][j], g.G().identity()});
                out.original_edge.push_back(-1);
            }
    }
    out.terminals = ends[x];
    out.graph = LabeledGraph(g.group(), std::move(names), std::move(edges));
    return out;
}

std::vector<Transition> immersion_transitions(const Immersion& im) {
    std::vector<Transition> out;
    for (const Trail& t : im.trails) {
        auto ts = transitions(t);
        out.insert(out.end(), ts.begin(), ts.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int foreign_transition_count(const SimpleFlower& sf, const std::vector<Transition>& im_transitions) {
    int c = 0;
    for (const Trail& t : sf.circuits)
        for (const Transition& tr : transitions(t))
            if (!std::binary_search(im_transitions.begin(), im_transitions.end(), tr)) ++c;
    return c;
}

int crossing_trail_count(const Immersion& im, const SimpleFlower& sf) {
    std::set<int> used;
    for (const Trail& c : sf.circuits)
        for (OrientedEdge s : c.steps) used.insert(s.edge);
    int n = 0;
    for (const Trail& t : im.trails)
        if (std::any_of(t.steps.begin(), t.steps.end(), [&](OrientedEdge s) { return used.count(s.edge) > 0; }))
            ++n;
    return n;
}

UncrossResult uncross_flower(const LabeledGraph& g, const LabeledGraph& pattern, const Immersion& im,
                             const Subgroup& sub, const SimpleFlower& sf) {
    const Vertex x = sf.center;
    std::string problem = simple_flower_problem(g, x, sub, sf);
    require(problem.empty(), ErrorCode::Precondition, "input is not a simple flower: " + problem);
    require(static_cast<int>(im.trails.size()) == pattern.edge_count(), ErrorCode::Precondition,
            "immersion does not match the pattern");
    Vertex hub = -1;
    for (Vertex c = 0; c < pattern.vertex_count() && hub < 0; ++c)
        if (std::all_of(pattern.edges().begin(), pattern.edges().end(),
                        [&](const Edge& e) { return e.tail == c || e.head == c; }))
            hub = c;
    require(hub >= 0, ErrorCode::Precondition, "pattern has no vertex incident to every edge");
    require(im.vertex_map.at(hub) == x, ErrorCode::Precondition,
            "the flower center is not the branch vertex of the pattern's hub");

    std::vector<Trail> branch;
    for (int p = 0; p < pattern.edge_count(); ++p)
        branch.push_back(pattern.edges()[p].tail == hub ? im.trails[p] : inverse(im.trails[p]));
    const auto im_tr = immersion_transitions(im);

    UncrossResult res;
    res.flower = sf;
    auto& circuits = res.flower.circuits;
    int potential = foreign_transition_count(res.flower, im_tr);
    res.potentials.push_back(potential);

    for (;;) {
        std::map<int, std::pair<int, int>> where;
        std::set<int> ends;
        for (int i = 0; i < static_cast<int>(circuits.size()); ++i) {
            for (int j = 0; j < static_cast<int>(circuits[i].size()); ++j) where[circuits[i].steps[j].edge] = {i, j};
            ends.insert(circuits[i].steps.front().edge);
            ends.insert(circuits[i].steps.back().edge);
        }
        bool rewrote = false;
        for (const Trail& t : branch) {
            if (std::any_of(t.steps.begin(), t.steps.end(), [&](OrientedEdge s) { return ends.count(s.edge) > 0; }))
                continue;
            std::size_t j = 0;
            while (j < t.size() && !where.count(t.steps[j].edge)) ++j;
            if (j == t.size()) continue;
            auto [ci, q] = where[t.steps[j].edge];
            Trail c = circuits[ci];
            if (c.steps[q] != t.steps[j]) {
                c = inverse(c);
                q = static_cast<int>(c.size()) - 1 - q;
            }
            Trail c1{{c.steps.begin(), c.steps.begin() + q}};
            Trail c2{{c.steps.begin() + q, c.steps.end()}};
            Trail t1{{t.steps.begin(), t.steps.begin() + static_cast<std::ptrdiff_t>(j)}};
            Trail next;
            if (t1.empty()) {
                next = !sub.contains(trail_label(g, c1)) ? c1 : c2;
            } else {
                Trail a = concat(t1, c2);
                next = !sub.contains(trail_label(g, a)) ? a : concat(c1, inverse(t1));
            }
            Trail before = circuits[ci];
            circuits[ci] = next;
            int p = foreign_transition_count(res.flower, im_tr);
            std::string bad = simple_flower_problem(g, x, sub, res.flower);
            require(bad.empty() && p < potential, ErrorCode::Internal,
                    "uncrossing rewrite did not improve the flower" + (bad.empty() ? "" : ": " + bad));
            potential = p;
            res.potentials.push_back(p);
            ++res.rewrites;
            rewrote = true;
            break;
        }
        if (!rewrote) break;
    }
    require(crossing_trail_count(im, res.flower) <= 2 * static_cast<int>(circuits.size()), ErrorCode::Internal,
            "uncrossed flower still meets more than 2r branch trails");
    return res;
}

namespace {

struct GeneratingShape {
    FlowerLayout layout;
    std::vector<Element> generators;
    int per_generator = 0;
};

GeneratingShape generating_shape(const LabeledGraph& f) {
    auto layout = flower_layout(f);
    require(layout.has_value(), ErrorCode::Precondition, "pattern is not a flower");
    GeneratingShape s{*layout, {}, 0};
    std::map<Element, int> counts;
    for (int p : layout->bundles[0]) counts[outward_label(f, *layout, p)]++;
    for (auto [a, c] : counts) {
        s.generators.push_back(a);
        s.per_generator = s.per_generator == 0 ? c : std::min(s.per_generator, c);
    }
    for (std::size_t i = 1; i < layout->bundles.size(); ++i) {
        std::map<Element, int> ci;
        for (int p : layout->bundles[i]) ci[outward_label(f, *layout, p)]++;
        require(ci == counts, ErrorCode::Precondition, "petals of the generating flower differ");
    }
    require(std::binary_search(s.generators.begin(), s.generators.end(), f.G().identity()),
            ErrorCode::Precondition, "generating flower lacks identity edges");
    return s;
}

}  // namespace

EnrichStepResult enrich_step(const LabeledGraph& g, const LabeledGraph& pattern, const Immersion& im,
                             const Subgroup& sub, int k, int n, std::optional<int> r, PackBudget budget) {
    require(k >= 1 && n >= 1, ErrorCode::InvalidParameter, "k and n must be positive");
    require_proper(sub);
    const FiniteGroup& G = g.G();
    const int q = G.order();
    GeneratingShape shape = generating_shape(pattern);
    require(shape.per_generator >= 2 * k * q && static_cast<int>(shape.layout.petals.size()) >= 2 * n,
            ErrorCode::Precondition, "pattern is smaller than a (sub, 2k|G|, 2n)-generating flower");
    for (Element s : shape.generators)
        require(sub.contains(s), ErrorCode::Precondition, "pattern generator lies outside the subgroup");
    ImmersionReport rep = verify_immersion(g, pattern, im);
    require(rep.ok(), ErrorCode::Precondition,
            std::string("input immersion is invalid: ") + to_string(rep.failed) + ": " + rep.detail);

    EnrichStepResult out;
    const LabeledGraph g1 = g.shifted(im.shift);
    const Vertex x = im.vertex_map[shape.layout.center];
    const int rr = r.value_or(n * k * (q - 1));
    PackOrCover poc = erdos_posa(g1, x, sub, rr, budget);
    for (const auto& line : poc.transcript) out.audit.push_back("erdos_posa: " + line);

    if (poc.cover) {
        auto keep = *poc.cover;
        LabeledGraph g2 = g1.without_edges(keep);
        ShiftAssignment sigma2 = relabel_edge_block(g2, x, sub);
        EnrichCovered cov;
        cov.shift = compose_shifts(G, sigma2, im.shift);
        cov.removed = keep;
        Multigraph m2 = g2.underlying();
        auto blocks = edge_blocks(m2);
        cov.block = blocks[block_of(blocks, x)];
        require(static_cast<long>(cov.removed.size()) <= 2L * n * k * q, ErrorCode::Internal,
                "cover exceeds 2nk|G|");
        out.audit.push_back("enrich_step: cover of " + std::to_string(cov.removed.size()) +
                            " edges, edge-block of x relabeled into the subgroup");
        out.covered = std::move(cov);
        return out;
    }

    UncrossResult unc = uncross_flower(g1, pattern, im, sub, *poc.packing);
    const auto& circuits = unc.flower.circuits;
    out.audit.push_back("enrich_step: uncrossing applied " + std::to_string(unc.rewrites) + " rewrites");

    std::set<int> circuit_edges;
    for (const Trail& c : circuits)
        for (OrientedEdge s : c.steps) circuit_edges.insert(s.edge);
    auto crosses = [&](int pos) {
        const Trail& t = im.trails[pos];
        return std::any_of(t.steps.begin(), t.steps.end(),
                           [&](OrientedEdge s) { return circuit_edges.count(s.edge) > 0; });
    };
    const int petals = static_cast<int>(shape.layout.petals.size());
    std::vector<int> crossing(petals, 0);
    for (int i = 0; i < petals; ++i)
        for (int p : shape.layout.bundles[i]) crossing[i] += crosses(p);
    std::vector<int> order(petals);
    for (int i = 0; i < petals; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return crossing[a] < crossing[b]; });
    std::vector<int> kept(order.begin(), order.begin() + n);
    std::sort(kept.begin(), kept.end());
    {
        std::string deleted;
        for (int i = n; i < petals; ++i) deleted += " " + std::to_string(order[i] + 1);
        out.audit.push_back("enrich_step: deleted petals" + deleted);
    }

    std::map<Element, std::vector<int>> by_label;
    for (int i = 0; i < static_cast<int>(circuits.size()); ++i)
        by_label[trail_label(g1, circuits[i])].push_back(i);
    Element alpha = -1;
    std::size_t best = 0;
    for (const auto& [a, ids] : by_label)
        if (ids.size() > best) alpha = a, best = ids.size();
    require(static_cast<long>(best) >= static_cast<long>(n) * k, ErrorCode::Precondition,
            "fewer than nk circuits share a label; r is too small");

    std::vector<Element> gens = shape.generators;
    gens.push_back(alpha);
    gens = normalized(gens);
    Subgroup grown = generate_subgroup(g.group(), gens);
    LabeledGraph next = build_flower({FlowerKind::Generating, k, n, g.group(), gens, grown});
    FlowerLayout nl = *flower_layout(next);

    EnrichGrown res{grown, gens, next, {}};
    Immersion& im2 = res.immersion;
    im2.vertex_map.assign(next.vertex_count(), -1);
    im2.vertex_map[nl.center] = x;
    im2.trails.resize(next.edge_count());
    im2.shift = im.shift;
    const Element one = G.identity();
    int dropped = 0;
    for (int j = 0; j < n; ++j) {
        const int old = kept[j];
        im2.vertex_map[nl.petals[j]] = im.vertex_map[shape.layout.petals[old]];
        std::map<Element, std::vector<Trail>> survivors;
        for (int p : shape.layout.bundles[old]) {
            if (crosses(p)) {
                ++dropped;
                continue;
            }
            survivors[outward_label(pattern, shape.layout, p)].push_back(outward_trail(pattern, shape.layout, im, p));
        }
        std::map<Element, int> next_of;
        int alpha_used = 0;
        for (int p : nl.bundles[j]) {
            Element s = outward_label(next, nl, p);
            Trail t;
            if (s == alpha) {
                std::size_t idx = static_cast<std::size_t>(k + alpha_used);
                require(idx < survivors[one].size(), ErrorCode::Internal, "not enough identity trails to splice");
                const Trail& c = circuits[by_label[alpha][static_cast<std::size_t>(j * k + alpha_used)]];
                t = concat(c, survivors[one][idx]);
                ++alpha_used;
            } else {
                int idx = next_of[s]++;
                require(idx < static_cast<int>(survivors[s].size()), ErrorCode::Internal,
                        "not enough surviving trails for a generator");
                t = survivors[s][idx];
            }
            im2.trails[p] = next.edges()[p].tail == nl.center ? t : inverse(t);
        }
    }
    im2.audit = im.audit;
    im2.audit.push_back("enrich_step: dropped " + std::to_string(dropped) + " crossing trails, added label " +
                        std::to_string(alpha) + ", subgroup order " + std::to_string(grown.size()));
    ImmersionReport check = verify_immersion(g, next, im2);
    require(check.ok(), ErrorCode::Internal,
            std::string("enrichment produced an invalid immersion: ") + to_string(check.failed) + ": " + check.detail);
    out.audit.push_back(im2.audit.back());
    out.grown = std::move(res);
    return out;
}

int floor_log2(int m) {
    require(m >= 1, ErrorCode::InvalidParameter, "log of a non-positive number");
    int l = 0;
    while ((m >> (l + 1)) > 0) ++l;
    return l;
}

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) {
        r *= b;
        require(r <= (1LL << 40), ErrorCode::InvalidParameter, "flower parameters overflow");
    }
    return r;
}

}  // namespace

EnrichResult enrich_flower(const LabeledGraph& g, const LabeledGraph& pattern, const Immersion& im, int k, int n,
                           PackBudget budget) {
    require(k >= 1 && n >= 1, ErrorCode::InvalidParameter, "k and n must be positive");
    const GroupPtr& group = g.group();
    const int q = group->order();
    const int L = floor_log2(q);
    auto layout = flower_layout(pattern);
    require(layout.has_value(), ErrorCode::Precondition, "pattern is not a flower");
    const long long need_k = k * ipow(q, 4 + L);
    const long long need_n = static_cast<long long>(n) * q;
    require(layout->multiplicity >= need_k && static_cast<long long>(layout->petals.size()) >= need_n,
            ErrorCode::Precondition,
            "flower immersion is smaller than (" + std::to_string(need_k) + ", " + std::to_string(need_n) + ")");
    ImmersionReport rep = verify_immersion(g, pattern, im, true);
    require(rep.ok(), ErrorCode::Precondition,
            std::string("input immersion is invalid: ") + to_string(rep.failed) + ": " + rep.detail);

    EnrichResult out;
    // Read the pattern's labels off its branch trails.
    std::vector<Edge> labeled = pattern.edges();
    for (int p = 0; p < pattern.edge_count(); ++p) labeled[p].label = trail_label(g, im.trails[p]);
    LabeledGraph f(group, pattern.vertex_names(), labeled);
    Immersion im_f = im;
    im_f.shift = identity_shift(g);

    ZeroFlower zero = extract_zero_flower(f, layout->multiplicity / q);
    Immersion cur = compose(g, f, im_f, zero.flower, zero.immersion);
    const Element one = group->identity();
    long long kk = k * ipow(q, 2) * ipow(2 * q, L);
    long long nn = static_cast<long long>(n) << L;
    Subgroup sub = generate_subgroup(group, std::vector<Element>{});
    std::vector<Element> gens{one};
    LabeledGraph p = build_flower({FlowerKind::Generating, static_cast<int>(kk), static_cast<int>(nn), group, gens, sub});
    cur = compose(g, zero.flower, cur, p, sub_flower(zero.flower, p));
    out.chain.push_back(sub);
    out.audit.push_back("zero flower extracted, restricted to a (" + std::to_string(kk) + ", " + std::to_string(nn) +
                        ") generating flower over the trivial subgroup");

    while (sub.is_proper()) {
        require(static_cast<int>(out.chain.size()) <= L, ErrorCode::Internal, "subgroup chain longer than log2|G|");
        const long long k2 = kk / (2 * q), n2 = nn / 2;
        EnrichStepResult step = enrich_step(g, p, cur, sub, static_cast<int>(k2), static_cast<int>(n2), {}, budget);
        out.audit.insert(out.audit.end(), step.audit.begin(), step.audit.end());
        if (step.covered) {
            out.subgroup = sub;
            out.covered = std::move(step.covered);
            return out;
        }
        sub = step.grown->subgroup;
        gens = step.grown->generators;
        p = std::move(step.grown->flower);
        cur = std::move(step.grown->immersion);
        kk = k2;
        nn = n2;
        out.chain.push_back(sub);
    }

    LabeledGraph pf = build_flower({FlowerKind::Generating, k * q * q, n, group, gens, {}});
    cur = compose(g, p, cur, pf, sub_flower(p, pf));
    LabeledGraph rich = build_flower({FlowerKind::Rich, k, n, group, {}, {}});
    cur = compose(g, pf, cur, rich, generating_to_rich(pf, rich, k));
    ImmersionReport fin = verify_immersion(g, rich, cur);
    require(fin.ok(), ErrorCode::Internal,
            std::string("rich flower immersion failed verification: ") + to_string(fin.failed) + ": " + fin.detail);
    require(cur.vertex_map[0] == im.vertex_map[layout->center], ErrorCode::Internal, "branch center moved");
    out.audit.push_back("rich flower reached through a chain of " + std::to_string(out.chain.size() - 1) + " steps");
    out.rich = std::move(rich);
    out.immersion = std::move(cur);
    return out;
}

}  // namespace gammaforge
