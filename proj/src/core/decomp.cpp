#include "gammaforge/decomp.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "gammaforge/error.hpp"
#include "gammaforge/flower.hpp"

namespace gammaforge {

namespace {

std::string set_string(const LabeledGraph* g, const VertexSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += g ? g->vertex_name(s[i]) : std::to_string(s[i]);
    }
    return out + "}";
}

bool subset_of(const VertexSet& a, const VertexSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool intersects(const VertexSet& a, const VertexSet& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        a[i] < b[j] ? ++i : ++j;
    }
    return false;
}

VertexSet set_minus(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VertexSet complement(int vertex_count, const VertexSet& s) {
    auto in = membership(s, vertex_count);
    VertexSet out;
    for (Vertex v = 0; v < vertex_count; ++v)
        if (!in[v]) out.push_back(v);
    return out;
}

VertexSet all_vertices(int vertex_count) {
    VertexSet out(vertex_count);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

void require_vertices(const LabeledGraph& g, const VertexSet& s) {
    for (Vertex v : s) require(g.has_vertex(v), ErrorCode::InvalidParameter, "vertex out of range");
}

}  // namespace

std::string certificate_problem(const LabeledGraph& g, const Certificate& c) {
    if (!c.subgroup.parent() || !(*c.subgroup.parent() == g.G())) return "subgroup belongs to another group";
    if (!c.subgroup.is_proper()) return "subgroup is not proper";
    for (Vertex v : c.bag)
        if (!g.has_vertex(v)) return "bag vertex out of range";
    if (normalized(c.bag) != c.bag) return "bag is not sorted and duplicate-free";
    if (static_cast<int>(c.shift.size()) != g.vertex_count()) return "shift does not cover every vertex";
    for (Element a : c.shift)
        if (!g.G().contains(a)) return "shift value outside the group";
    std::set<int> x(c.edges.begin(), c.edges.end());
    for (int id : c.edges)
        if (!g.has_edge(id)) return "edge " + std::to_string(id) + " does not exist";
    auto boundary = boundary_edges(g, c.bag);
    auto inner = inner_edges(g, c.bag);
    for (int id : boundary)
        if (!x.count(id)) return "boundary edge " + std::to_string(id) + " is missing from X";
    std::set<int> allowed(boundary.begin(), boundary.end());
    allowed.insert(inner.begin(), inner.end());
    for (int id : x)
        if (!allowed.count(id)) return "edge " + std::to_string(id) + " of X is neither inside nor on the boundary";
    for (int id : inner) {
        if (x.count(id)) continue;
        const Edge& e = g.edge(id);
        Element lbl = g.G().mul(g.G().mul(c.shift[e.tail], e.label), g.G().inv(c.shift[e.head]));
        if (!c.subgroup.contains(lbl))
            return "inner edge " + std::to_string(id) + " outside X is labeled outside the subgroup";
    }
    return {};
}

int certificate_value(const LabeledGraph& g, const Certificate& c) {
    std::string p = certificate_problem(g, c);
    require(p.empty(), ErrorCode::InvalidCertificate, "invalid certificate: " + p);
    auto inner = inner_edges(g, c.bag);
    std::set<int> in(inner.begin(), inner.end());
    int internal = 0;
    for (int id : c.edges) internal += in.count(id) ? 1 : 0;
    return static_cast<int>(boundary_edges(g, c.bag).size()) + 2 * internal;
}

SetValue set_value(const LabeledGraph& g, const VertexSet& b_in) {
    const FiniteGroup& G = g.G();
    require(G.order() >= 2, ErrorCode::NoProperSubgroup, "the trivial group has no proper subgroup");
    VertexSet b = normalized(b_in);
    require_vertices(g, b);
    const auto boundary = boundary_edges(g, b);
    const auto inner = inner_edges(g, b);
    const auto subgroups = maximal_subgroups(g.group());

    // Inner edges grouped per connected piece of B, with each edge checked
    // once its later endpoint (in BFS order) is assigned.
    std::vector<int> local(g.vertex_count(), -1);
    for (std::size_t i = 0; i < b.size(); ++i) local[b[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(b.size());
    for (int id : inner) {
        const Edge& e = g.edge(id);
        adj[local[e.tail]].push_back(id);
        if (e.tail != e.head) adj[local[e.head]].push_back(id);
    }
    std::vector<std::vector<int>> pieces;
    std::vector<char> seen(b.size(), 0);
    for (std::size_t s = 0; s < b.size(); ++s) {
        if (seen[s]) continue;
        std::vector<int> order{static_cast<int>(s)};
        seen[s] = 1;
        for (std::size_t i = 0; i < order.size(); ++i)
            for (int id : adj[order[i]]) {
                const Edge& e = g.edge(id);
                for (Vertex w : {e.tail, e.head})
                    if (!seen[local[w]]) seen[local[w]] = 1, order.push_back(local[w]);
            }
        pieces.push_back(std::move(order));
    }

    int best = INT_MAX;
    std::optional<Certificate> witness;
    for (const Subgroup& h : subgroups) {
        const auto reps = right_coset_representatives(h);
        std::vector<Element> sigma(b.size(), G.identity());
        int total = 0;
        for (const auto& order : pieces) {
            std::vector<int> rank(b.size(), -1);
            for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
            std::vector<std::vector<int>> checks(order.size());
            for (std::size_t i = 0; i < order.size(); ++i)
                for (int id : adj[order[i]]) {
                    const Edge& e = g.edge(id);
                    int later = std::max(rank[local[e.tail]], rank[local[e.head]]);
                    if (later == static_cast<int>(i)) checks[i].push_back(id);
                }
            std::vector<Element> cur(b.size(), G.identity()), keep = cur;
            int piece_best = INT_MAX;
            auto bad = [&](int id) {
                const Edge& e = g.edge(id);
                Element lbl = G.mul(G.mul(cur[local[e.tail]], e.label), G.inv(cur[local[e.head]]));
                return h.contains(lbl) ? 0 : 1;
            };
            std::function<void(std::size_t, int)> dfs = [&](std::size_t i, int cost) {
                if (cost >= piece_best) return;
                if (i == order.size()) {
                    piece_best = cost;
                    keep = cur;
                    return;
                }
                for (Element r : reps) {
                    cur[order[i]] = r;
                    int add = 0;
                    for (int id : checks[i]) add += bad(id);
                    dfs(i + 1, cost + add);
                }
                cur[order[i]] = G.identity();
            };
            dfs(0, 0);
            total += piece_best;
            for (int v : order) sigma[v] = keep[v];
        }
        if (total < best) {
            best = total;
            Certificate c{b, boundary, identity_shift(g), h};
            for (std::size_t i = 0; i < b.size(); ++i) c.shift[b[i]] = sigma[i];
            for (int id : inner) {
                const Edge& e = g.edge(id);
                Element lbl = G.mul(G.mul(c.shift[e.tail], e.label), G.inv(c.shift[e.head]));
                if (!h.contains(lbl)) c.edges.push_back(id);
            }
            std::sort(c.edges.begin(), c.edges.end());
            witness = std::move(c);
        }
    }
    return SetValue{static_cast<int>(boundary.size()) + 2 * best, std::move(*witness)};
}

std::string decomposition_problem(int vertex_count, const TreeCutDecomposition& d) {
    const int nodes = d.node_count();
    if (nodes == 0) return "tree has no nodes";
    if (static_cast<int>(d.tree_edges.size()) != nodes - 1) return "tree must have exactly nodes-1 edges";
    std::vector<int> parent(nodes);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
    for (auto [a, b] : d.tree_edges) {
        if (a < 0 || b < 0 || a >= nodes || b >= nodes) return "tree edge refers to an unknown node";
        if (find(a) == find(b)) return "tree has a cycle";
        parent[find(a)] = find(b);
    }
    std::vector<int> owner(vertex_count, -1);
    for (int i = 0; i < nodes; ++i)
        for (Vertex v : d.bags[i]) {
            if (v < 0 || v >= vertex_count) return "bag " + std::to_string(i) + " holds an unknown vertex";
            if (owner[v] >= 0)
                return "vertex " + std::to_string(v) + " lies in bags " + std::to_string(owner[v]) + " and " +
                       std::to_string(i);
            owner[v] = i;
        }
    for (Vertex v = 0; v < vertex_count; ++v)
        if (owner[v] < 0) return "vertex " + std::to_string(v) + " lies in no bag";
    return {};
}

Torso torso(const Multigraph& g, const TreeCutDecomposition& d, int node) {
    std::string p = decomposition_problem(g.vertex_count, d);
    require(p.empty(), ErrorCode::Structural, "not a tree-cut decomposition: " + p);
    require(node >= 0 && node < d.node_count(), ErrorCode::InvalidParameter, "unknown tree node");
    std::vector<std::vector<int>> adj(d.node_count());
    for (auto [a, b] : d.tree_edges) adj[a].push_back(b), adj[b].push_back(a);
    std::vector<int> nbrs = adj[node];
    std::sort(nbrs.begin(), nbrs.end());

    Torso out;
    VertexSet bag = normalized(d.bags[node]);
    std::vector<Vertex> map(g.vertex_count, -1);
    for (Vertex v : bag) {
        map[v] = static_cast<Vertex>(out.origin.size());
        out.origin.push_back(v);
        out.branch.push_back(-1);
    }
    for (int nb : nbrs) {
        const Vertex id = static_cast<Vertex>(out.origin.size());
        out.origin.push_back(-1);
        out.branch.push_back(nb);
        std::vector<int> stack{nb};
        std::vector<char> seen(d.node_count(), 0);
        seen[node] = seen[nb] = 1;
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            for (Vertex v : d.bags[a]) map[v] = id;
            for (int c : adj[a])
                if (!seen[c]) seen[c] = 1, stack.push_back(c);
        }
    }
    out.graph.vertex_count = static_cast<int>(out.origin.size());
    for (auto [u, v] : g.edges) {
        Vertex a = map[u], b = map[v];
        if (a == b && out.origin[a] < 0) continue;
        out.graph.add_edge(a, b);
    }
    return out;
}

std::string container_problem(const ContainerSystem& cs) {
    for (std::size_t i = 0; i < cs.target_cores.size(); ++i) {
        VertexSet s = normalized(cs.target_cores[i]);
        bool held = std::any_of(cs.containers.begin(), cs.containers.end(),
                                [&](const VertexSet& c) { return subset_of(s, normalized(c)); });
        if (!held) return "core " + set_string(nullptr, s) + " lies in no container";
    }
    return {};
}

std::optional<Vertex> fully_connected_vertex(const Multigraph& g, const VertexSet& c) {
    for (Vertex v : c)
        if (is_fully_connected(g, v, c)) return v;
    return std::nullopt;
}

namespace {

// Sum of (|V|+1)^value over containers, as base-(|V|+1) digits, paired with
// the total container size.
struct Potential {
    std::vector<long long> digits;
    long long size = 0;

    static Potential of(const std::vector<int>& values, const std::vector<VertexSet>& sets, int base) {
        Potential p;
        for (int v : values) {
            if (static_cast<int>(p.digits.size()) <= v) p.digits.resize(v + 1, 0);
            p.digits[v]++;
        }
        for (std::size_t i = 0; i < p.digits.size(); ++i)
            if (p.digits[i] >= base) {
                if (i + 1 == p.digits.size()) p.digits.push_back(0);
                p.digits[i + 1] += p.digits[i] / base;
                p.digits[i] %= base;
            }
        while (!p.digits.empty() && p.digits.back() == 0) p.digits.pop_back();
        for (const auto& s : sets) p.size += static_cast<long long>(s.size());
        return p;
    }

    bool operator<(const Potential& o) const {
        if (digits.size() != o.digits.size()) return digits.size() < o.digits.size();
        for (std::size_t i = digits.size(); i-- > 0;)
            if (digits[i] != o.digits[i]) return digits[i] < o.digits[i];
        return size < o.size;
    }
};

}  // namespace

RefineResult refine_containers(const LabeledGraph& g, const ContainerSystem& initial, int t) {
    const Multigraph m = g.underlying();
    const int nv = g.vertex_count();
    std::string p = container_problem(initial);
    require(p.empty(), ErrorCode::InvalidParameter, "not a container system: " + p);
    std::map<VertexSet, int> memo;
    auto val = [&](const VertexSet& s) {
        auto it = memo.find(s);
        if (it == memo.end()) it = memo.emplace(s, set_value(g, s).value).first;
        return it->second;
    };

    RefineResult out;
    std::vector<VertexSet> cores;
    for (const auto& s : initial.target_cores) cores.push_back(normalized(s));
    std::vector<VertexSet> cs;
    for (const auto& c : initial.containers) {
        VertexSet s = normalized(c);
        require_vertices(g, s);
        require(val(s) <= t, ErrorCode::InvalidParameter,
                "container " + set_string(&g, s) + " has value " + std::to_string(val(s)) + " > t");
        if (std::find(cs.begin(), cs.end(), s) == cs.end()) cs.push_back(s);
    }
    auto potential = [&] {
        std::vector<int> values;
        for (const auto& c : cs) values.push_back(val(c));
        return Potential::of(values, cs, nv + 1);
    };
    auto covered = [&] {
        return std::all_of(cores.begin(), cores.end(), [&](const VertexSet& s) {
            return std::any_of(cs.begin(), cs.end(), [&](const VertexSet& c) { return subset_of(s, c); });
        });
    };

    Potential pot = potential();
    for (;;) {
        bool moved = false;
        // Nested containers.
        for (std::size_t i = 0; i < cs.size() && !moved; ++i)
            for (std::size_t j = 0; j < cs.size() && !moved; ++j)
                if (i != j && subset_of(cs[i], cs[j])) {
                    out.log.push_back("drop " + set_string(&g, cs[i]) + " inside " + set_string(&g, cs[j]));
                    cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(i));
                    moved = true;
                }
        // Overlapping pairs.
        for (std::size_t i = 0; i < cs.size() && !moved; ++i)
            for (std::size_t j = i + 1; j < cs.size() && !moved; ++j) {
                if (!intersects(cs[i], cs[j])) continue;
                VertexSet bi = set_minus(cs[i], cs[j]), bj = set_minus(cs[j], cs[i]);
                if (val(bi) <= val(cs[i])) {
                    out.log.push_back("shrink " + set_string(&g, cs[i]) + " to " + set_string(&g, bi));
                    cs[i] = bi;
                } else {
                    require(val(bj) <= val(cs[j]), ErrorCode::Internal, "posimodularity failed on a container pair");
                    out.log.push_back("shrink " + set_string(&g, cs[j]) + " to " + set_string(&g, bj));
                    cs[j] = bj;
                }
                moved = true;
            }
        // Unrefined containers.
        for (std::size_t i = 0; i < cs.size() && !moved; ++i) {
            if (fully_connected_vertex(m, cs[i])) continue;
            const VertexSet c = cs[i];
            const int dc = cut_size(m, c);
            const VertexSet outside = complement(nv, c);
            std::vector<VertexSet> parts;
            for (const auto& s : cores) {
                if (!subset_of(s, c)) continue;
                MinCut mc = min_cut(m, VertexSet{s.front()}, outside);
                require(mc.value < dc && subset_of(s, mc.source_side), ErrorCode::Internal,
                        "unrefined container without a smaller cut around its core");
                if (std::find(parts.begin(), parts.end(), mc.source_side) == parts.end())
                    parts.push_back(mc.source_side);
            }
            std::string msg = "split " + set_string(&g, c) + " into";
            for (const auto& a : parts) msg += " " + set_string(&g, a);
            out.log.push_back(msg);
            cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(i));
            for (auto& a : parts)
                if (std::find(cs.begin(), cs.end(), a) == cs.end()) cs.push_back(std::move(a));
            moved = true;
        }
        if (!moved) break;
        require(covered(), ErrorCode::Internal, "refinement step uncovered a core");
        Potential next = potential();
        require(next < pot, ErrorCode::Internal, "refinement potential did not decrease");
        pot = std::move(next);
        ++out.steps;
    }
    std::sort(cs.begin(), cs.end());
    for (const auto& c : cs) {
        out.values.push_back(val(c));
        require(out.values.back() <= t, ErrorCode::Internal, "refined container exceeds t");
    }
    out.system.containers = std::move(cs);
    out.system.target_cores = std::move(cores);
    return out;
}

VertexSet minimal_cut_superset(const Multigraph& g, const VertexSet& s_in, int t, int exhaustive_limit) {
    VertexSet s = normalized(s_in);
    require(!s.empty(), ErrorCode::InvalidParameter, "empty core");
    auto heavy = [&](Vertex v) { return degree(g, v) > t; };
    VertexSet c = all_vertices(g.vertex_count);
    // Two passes: heavy vertices first, then everything.
    for (int pass = 0; pass < 2; ++pass) {
        for (;;) {
            bool shrunk = false;
            for (Vertex v : set_minus(c, s)) {
                if (pass == 0 && !heavy(v)) continue;
                VertexSet sinks = complement(g.vertex_count, c);
                sinks.push_back(v);
                MinCut mc = min_cut(g, s, normalized(sinks));
                if (mc.value <= t) {
                    c = mc.source_side;
                    shrunk = true;
                    break;
                }
            }
            if (!shrunk) break;
        }
    }
    const VertexSet extra = set_minus(c, s);
    if (std::none_of(extra.begin(), extra.end(), heavy)) return c;

    VertexSet light;
    for (Vertex v : complement(g.vertex_count, s))
        if (!heavy(v)) light.push_back(v);
    if (static_cast<int>(light.size()) > exhaustive_limit) return c;
    std::optional<VertexSet> best;
    for (unsigned long mask = 0; mask < (1ul << light.size()); ++mask) {
        if (best && static_cast<std::size_t>(std::popcount(mask)) + s.size() >= best->size()) continue;
        VertexSet b = s;
        for (std::size_t i = 0; i < light.size(); ++i)
            if (mask >> i & 1ul) b.push_back(light[i]);
        b = normalized(b);
        if (cut_size(g, b) <= t) best = std::move(b);
    }
    return best ? *best : c;
}

TreeCutDecomposition build_tree_cut(const Multigraph& g, const ContainerSystem& containers, int t, int n) {
    require(t >= 1 && n >= 1, ErrorCode::InvalidParameter, "t and n must be positive");
    require(is_two_edge_connected(g), ErrorCode::Precondition, "graph is not 2-edge-connected");
    std::vector<VertexSet> pool;
    for (const auto& c : containers.containers) pool.push_back(normalized(c));
    for (std::size_t i = 0; i < pool.size(); ++i) {
        require(fully_connected_vertex(g, pool[i]).has_value(), ErrorCode::Precondition,
                "container " + set_string(nullptr, pool[i]) + " is not refined");
        for (std::size_t j = i + 1; j < pool.size(); ++j)
            require(!intersects(pool[i], pool[j]), ErrorCode::Precondition, "containers are not pairwise disjoint");
    }

    Multigraph cur = g;
    // Current vertex -> original vertex, or -(node + 1) for a contracted node.
    std::vector<int> origin(g.vertex_count);
    std::iota(origin.begin(), origin.end(), 0);
    std::vector<std::vector<int>> made;
    for (;;) {
        require(is_two_edge_connected(cur), ErrorCode::Internal, "contracted graph lost 2-edge-connectivity");
        CorePartition cores = t_cores(cur, t);
        if (cores.cores.empty()) break;
        const VertexSet* pick = nullptr;
        for (const auto& s : cores.cores)
            if (!pick || s.size() > pick->size()) pick = &s;
        VertexSet c;
        if (static_cast<int>(pick->size()) <= n) {
            // Every core is small. Some cores admit no cut set that avoids
            // the other high-degree vertices, so take the first that does.
            std::vector<const VertexSet*> order;
            for (const auto& s : cores.cores) order.push_back(&s);
            std::stable_sort(order.begin(), order.end(),
                             [](const VertexSet* a, const VertexSet* b) { return a->size() > b->size(); });
            for (const VertexSet* s : order) {
                VertexSet cand = minimal_cut_superset(cur, *s, t);
                if (c.empty()) pick = s, c = cand;
                const VertexSet extra = set_minus(cand, *s);
                if (std::none_of(extra.begin(), extra.end(), [&](Vertex v) { return degree(cur, v) > t; })) {
                    pick = s;
                    c = std::move(cand);
                    break;
                }
            }
        }
        const VertexSet& s = *pick;
        if (static_cast<int>(s.size()) > n) {
            VertexSet orig;
            for (Vertex v : s) {
                require(origin[v] >= 0, ErrorCode::Internal, "core holds a contracted vertex");
                orig.push_back(origin[v]);
            }
            orig = normalized(orig);
            auto it = std::find_if(pool.begin(), pool.end(), [&](const VertexSet& p) { return subset_of(orig, p); });
            require(it != pool.end(), ErrorCode::Precondition,
                    "core " + set_string(nullptr, orig) + " of more than n vertices lies in no container");
            std::vector<Vertex> back(g.vertex_count, -1);
            for (Vertex v = 0; v < cur.vertex_count; ++v)
                if (origin[v] >= 0) back[origin[v]] = v;
            for (Vertex v : *it) {
                require(back[v] >= 0, ErrorCode::Internal, "container meets an earlier contraction");
                c.push_back(back[v]);
            }
            c = normalized(c);
            pool.erase(it);
            require(cut_size(cur, c) <= t, ErrorCode::Precondition, "container boundary exceeds t");
        }
        require(c.size() >= 2, ErrorCode::Internal, "contraction would not shrink the graph");
        std::vector<int> bag;
        for (Vertex v : c) bag.push_back(origin[v]);
        const int node = static_cast<int>(made.size());
        made.push_back(std::move(bag));
        Contraction ct = contract(cur, c);
        std::vector<int> next(ct.graph.vertex_count, 0);
        for (Vertex v = 0; v < cur.vertex_count; ++v) next[ct.map[v]] = origin[v];
        next[ct.merged] = -(node + 1);
        origin = std::move(next);
        cur = std::move(ct.graph);
    }
    made.push_back(origin);

    // The last entry is the root; number nodes so the root is 0.
    const int count = static_cast<int>(made.size());
    auto id = [&](int k) { return count - 1 - k; };
    TreeCutDecomposition d;
    d.bags.resize(count);
    for (int k = 0; k < count; ++k)
        for (int code : made[k]) {
            if (code >= 0) d.bags[id(k)].push_back(code);
            else d.tree_edges.emplace_back(id(k), id(-code - 1));
        }
    for (auto& b : d.bags) b = normalized(b);
    for (auto& [a, b] : d.tree_edges)
        if (a > b) std::swap(a, b);
    std::sort(d.tree_edges.begin(), d.tree_edges.end());
    std::string p = decomposition_problem(g.vertex_count, d);
    require(p.empty(), ErrorCode::Internal, "built decomposition is malformed: " + p);
    return d;
}

const char* to_string(BagOutcome o) noexcept {
    switch (o) {
    case BagOutcome::Neither: return "neither";
    case BagOutcome::FewHighDegree: return "few-high-degree";
    case BagOutcome::Certified: return "certified";
    }
    return "neither";
}

StructureReport verify_structure(const LabeledGraph& g, const ShiftAssignment& shift, const TreeCutDecomposition& d,
                                 int t, int n) {
    std::string p = decomposition_problem(g.vertex_count(), d);
    require(p.empty(), ErrorCode::Structural, "not a tree-cut decomposition: " + p);
    require(static_cast<int>(shift.size()) == g.vertex_count(), ErrorCode::Structural,
            "shift does not cover every vertex");
    const Multigraph m = g.underlying();
    const FiniteGroup& G = g.G();
    const auto subgroups = G.order() >= 2 ? maximal_subgroups(g.group()) : std::vector<Subgroup>{};
    StructureReport rep;
    rep.ok = true;
    for (int node = 0; node < d.node_count(); ++node) {
        BagReport br;
        br.node = node;
        Torso tor = torso(m, d, node);
        for (Vertex v = 0; v < tor.graph.vertex_count; ++v) {
            if (degree(tor.graph, v) <= t) continue;
            if (tor.origin[v] >= 0) br.high_degree.push_back(tor.origin[v]);
            else br.heavy_branches.push_back(tor.branch[v]);
        }
        if (static_cast<int>(br.high_degree.size()) <= n && br.heavy_branches.empty()) {
            br.outcome = BagOutcome::FewHighDegree;
        } else {
            const VertexSet bag = normalized(d.bags[node]);
            const auto boundary = boundary_edges(g, bag);
            const auto inner = inner_edges(g, bag);
            for (const Subgroup& h : subgroups) {
                Certificate c{bag, boundary, shift, h};
                for (int id : inner) {
                    const Edge& e = g.edge(id);
                    if (!h.contains(G.mul(G.mul(shift[e.tail], e.label), G.inv(shift[e.head]))))
                        c.edges.push_back(id);
                }
                std::sort(c.edges.begin(), c.edges.end());
                int v = certificate_value(g, c);
                if (br.value < 0 || v < br.value) {
                    br.value = v;
                    if (v <= t) br.certificate = std::move(c);
                }
            }
            if (br.certificate) {
                br.outcome = BagOutcome::Certified;
            } else {
                br.detail = std::to_string(br.high_degree.size()) + " torso vertices above t (bound " +
                            std::to_string(n) + "), " + std::to_string(br.heavy_branches.size()) +
                            " heavy new vertices, best certificate value " + std::to_string(br.value);
                rep.ok = false;
            }
        }
        rep.bags.push_back(std::move(br));
    }
    return rep;
}

std::optional<long long> theorem_t(int group_order, int k, int n) {
    require(group_order >= 1 && k >= 1 && n >= 1, ErrorCode::InvalidParameter, "parameters must be positive");
    long long r = 4LL * k * n;
    const int e = 6 + floor_log2(group_order);
    for (int i = 0; i < e; ++i)
        if (__builtin_mul_overflow(r, static_cast<long long>(group_order), &r)) return std::nullopt;
    return r;
}

CoreCertificate core_certificate(const LabeledGraph& g, const VertexSet& s_in, int k, int n, int t,
                                 PackBudget budget) {
    require(k >= 1 && n >= 1 && t >= 1, ErrorCode::InvalidParameter, "k, n and t must be positive");
    const Multigraph m = g.underlying();
    const int q = g.G().order();
    require(is_two_edge_connected(m), ErrorCode::Precondition, "graph is not 2-edge-connected");
    VertexSet s = normalized(s_in);
    require_vertices(g, s);
    require(static_cast<long long>(s.size()) > static_cast<long long>(n) * q, ErrorCode::Precondition,
            "core has at most n|G| vertices");
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            require(edge_connectivity(m, s[i], s[j], t + 1) >= t + 1, ErrorCode::Precondition,
                    "core vertices are not pairwise (t+1)-edge-connected");
    const int L = floor_log2(q);
    long long kp = k;
    for (int i = 0; i < 4 + L; ++i) {
        kp *= q;
        require(kp <= INT_MAX / 4, ErrorCode::InvalidParameter, "flower multiplicity overflows");
    }
    const int np = n * q;

    CoreCertificate out;
    Immersion im = flower_from_core(g, s, static_cast<int>(kp), np);
    out.audit.insert(out.audit.end(), im.audit.begin(), im.audit.end());
    LabeledGraph pattern = build_flower({FlowerKind::Plain, static_cast<int>(kp), np, g.group(), {}, {}});
    EnrichResult er = enrich_flower(g, pattern, im, k, n, budget);
    out.audit.insert(out.audit.end(), er.audit.begin(), er.audit.end());
    if (er.rich) {
        out.rich = RichWitness{*er.rich, *er.immersion};
        return out;
    }
    const EnrichCovered& cov = *er.covered;
    const VertexSet& bag = cov.block;
    require(subset_of(s, bag), ErrorCode::Precondition,
            "the cover separates the core; t is below the level the construction needs");
    std::set<int> x(cov.removed.begin(), cov.removed.end());
    std::vector<int> edges = boundary_edges(g, bag);
    for (int id : inner_edges(g, bag))
        if (x.count(id)) edges.push_back(id);
    std::sort(edges.begin(), edges.end());
    Certificate c{bag, edges, cov.shift, *er.subgroup};
    out.value = certificate_value(g, c);
    require(out.value <= 2 * static_cast<int>(cov.removed.size()), ErrorCode::Internal,
            "certificate value exceeds 2|X|");
    require(out.value <= t, ErrorCode::Precondition,
            "certificate value " + std::to_string(out.value) + " exceeds t = " + std::to_string(t));
    out.audit.push_back("core certificate for " + set_string(&g, bag) + " of value " + std::to_string(out.value));
    out.certificate = std::move(c);
    return out;
}

std::optional<SetValue> find_container(const LabeledGraph& g, const VertexSet& s_in, int t, int exhaustive_limit) {
    const Multigraph m = g.underlying();
    VertexSet s = normalized(s_in);
    require_vertices(g, s);
    std::optional<SetValue> best;
    auto consider = [&](const VertexSet& b) {
        if (cut_size(m, b) > t) return;
        SetValue sv = set_value(g, b);
        if (sv.value > t) return;
        if (!best || sv.value < best->value ||
            (sv.value == best->value && sv.certificate.bag.size() < best->certificate.bag.size()))
            best = std::move(sv);
    };
    // The chain of shrinking cut sets from V(G) down to a minimal one.
    VertexSet c = all_vertices(g.vertex_count());
    consider(c);
    for (;;) {
        bool shrunk = false;
        for (Vertex v : set_minus(c, s)) {
            VertexSet sinks = complement(g.vertex_count(), c);
            sinks.push_back(v);
            MinCut mc = min_cut(m, s, normalized(sinks));
            if (mc.value <= t) {
                c = mc.source_side;
                consider(c);
                shrunk = true;
                break;
            }
        }
        if (!shrunk) break;
    }
    if (best) return best;
    VertexSet rest = complement(g.vertex_count(), s);
    if (static_cast<int>(rest.size()) > exhaustive_limit) return std::nullopt;
    for (unsigned mask = 0; mask < (1u << rest.size()); ++mask) {
        VertexSet b = s;
        for (std::size_t i = 0; i < rest.size(); ++i)
            if (mask >> i & 1u) b.push_back(rest[i]);
        consider(normalized(b));
    }
    return best;
}

DecomposeResult structure_decompose(const LabeledGraph& g, const DecomposeOptions& opts) {
    require(opts.k >= 1 && opts.n >= 1, ErrorCode::InvalidParameter, "k and n must be positive");
    const int q = g.G().order();
    require(q >= 2, ErrorCode::NoProperSubgroup, "the trivial group has no proper subgroup");
    const Multigraph m = g.underlying();
    require(is_two_edge_connected(m), ErrorCode::Precondition, "graph is not 2-edge-connected");

    DecomposeResult res;
    res.theorem_t = theorem_t(q, opts.k, opts.n);
    if (opts.override_t) {
        require(*opts.override_t >= 1, ErrorCode::InvalidParameter, "t must be positive");
        res.t = *opts.override_t;
        res.t_overridden = true;
        res.notes.push_back("t overridden; the theorem's guarantees hold only at t = " +
                            (res.theorem_t ? std::to_string(*res.theorem_t) : std::string("(overflow)")));
    } else {
        require(res.theorem_t && *res.theorem_t <= INT_MAX, ErrorCode::InvalidParameter,
                "t overflows; pass an override");
        res.t = static_cast<int>(*res.theorem_t);
    }
    const int t = res.t;
    res.outcome_bound = opts.outcome_bound.value_or(opts.n * q);
    require(res.outcome_bound >= 1, ErrorCode::InvalidParameter, "outcome bound must be positive");

    ContainerSystem initial;
    for (const VertexSet& s : t_cores(m, t).cores) {
        if (static_cast<int>(s.size()) <= res.outcome_bound) continue;
        initial.target_cores.push_back(s);
        std::optional<VertexSet> container;
        if (static_cast<long long>(s.size()) > static_cast<long long>(opts.n) * q) {
            try {
                CoreCertificate cc = core_certificate(g, s, opts.k, opts.n, t, opts.budget);
                if (cc.rich) {
                    res.rich = std::move(cc.rich);
                    res.notes.push_back("core " + set_string(&g, s) + " yields a rich flower immersion");
                    return res;
                }
                container = cc.certificate->bag;
                res.notes.push_back("core " + set_string(&g, s) + ": certificate via flower enrichment");
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Precondition || !res.t_overridden) throw;
                res.notes.push_back("core " + set_string(&g, s) + ": enrichment unavailable (" + e.what() + ")");
            }
        }
        if (!container) {
            auto found = find_container(g, s, t);
            require(found.has_value(), ErrorCode::Precondition,
                    "core " + set_string(&g, s) + " has no container of value at most t");
            container = found->certificate.bag;
            res.notes.push_back("core " + set_string(&g, s) + ": container by direct search, value " +
                                std::to_string(found->value));
        }
        initial.containers.push_back(*container);
    }
    RefineResult refined = refine_containers(g, initial, t);
    res.containers = refined.system;
    res.tree = build_tree_cut(m, res.containers, t, res.outcome_bound);
    res.shift = identity_shift(g);
    for (const VertexSet& c : res.containers.containers) {
        SetValue sv = set_value(g, c);
        for (Vertex v : c) res.shift[v] = sv.certificate.shift[v];
    }
    StructureReport rep = verify_structure(g, res.shift, res.tree, t, res.outcome_bound);
    for (const auto& b : rep.bags)
        require(b.outcome != BagOutcome::Neither, ErrorCode::Internal,
                "decomposition failed its own verification at bag " + set_string(&g, res.tree.bags[b.node]) + ": " +
                    b.detail);
    for (const auto& b : rep.bags) res.outcomes.push_back(b.outcome);
    return res;
}

Tri check_converse(const LabeledGraph& g, const ShiftAssignment& shift, const TreeCutDecomposition& d, int t, int n,
                   SearchBudget budget) {
    StructureReport rep = verify_structure(g, shift, d, t, n);
    if (!rep.ok) {
        std::string why;
        for (const auto& b : rep.bags)
            if (b.outcome == BagOutcome::Neither) {
                why = "bag " + std::to_string(b.node) + ": " + b.detail;
                break;
            }
        fail(ErrorCode::Precondition, "decomposition does not verify: " + why);
    }
    LabeledGraph rich = build_flower({FlowerKind::Rich, t + 1, n, g.group(), {}, {}});
    return forbids(g, rich, budget);
}

std::string to_dot(const LabeledGraph& g, const TreeCutDecomposition& d, const std::vector<BagOutcome>& outcomes) {
    std::string out = "graph decomposition {\n  node [shape=box];\n";
    for (int i = 0; i < d.node_count(); ++i) {
        out += "  n" + std::to_string(i) + " [label=\"" + std::to_string(i) + ": " + set_string(&g, d.bags[i]);
        if (i < static_cast<int>(outcomes.size())) out += "\\n" + std::string(to_string(outcomes[i]));
        out += "\"];\n";
    }
    for (auto [a, b] : d.tree_edges) out += "  n" + std::to_string(a) + " -- n" + std::to_string(b) + ";\n";
    return out + "}\n";
}

}  // namespace gammaforge
