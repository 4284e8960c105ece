// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "build.hpp"
#include "gammaforge/conn.hpp"
#include "gammaforge/decomp.hpp"
#include "gammaforge/error.hpp"
#include "gammaforge/flower.hpp"
#include "gammaforge/group.hpp"
#include "gammaforge/immerse.hpp"
#include "gammaforge/lgraph.hpp"
#include "gammaforge/pack.hpp"
#include "oracles.hpp"

using namespace gammaforge;
using gftest::graph_of;

namespace {

struct Outcome {
    bool pass = true;
    std::string summary;
    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (failures.size() < 5) failures.push_back(what);
    }
};

using Step = std::pair<int, bool>;
using Seq = std::vector<Step>;

// ---------------------------------------------------------------- groups

GroupPtr product_group(const GroupPtr& a, const GroupPtr& b, const std::string& name) {
    const int p = a->order(), q = b->order();
    std::vector<std::vector<Element>> t(p * q, std::vector<Element>(p * q));
    for (int x = 0; x < p * q; ++x)
        for (int y = 0; y < p * q; ++y) t[x][y] = a->mul(x / q, y / q) * q + b->mul(x % q, y % q);
    return make_group(FiniteGroup::from_table(t, name));
}

// Symmetries of a square as permutations of its corners.
GroupPtr dihedral4() {
    std::vector<std::vector<int>> perms;
    for (int r = 0; r < 4; ++r) {
        std::vector<int> rot(4), ref(4);
        for (int i = 0; i < 4; ++i) {
            rot[i] = (i + r) % 4;
            ref[i] = (4 - i + r) % 4;
        }
        perms.push_back(rot);
        perms.push_back(ref);
    }
    std::vector<std::vector<Element>> t(8, std::vector<Element>(8));
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
            std::vector<int> c(4);
            for (int i = 0; i < 4; ++i) c[i] = perms[a][perms[b][i]];
            t[a][b] = static_cast<Element>(std::find(perms.begin(), perms.end(), c) - perms.begin());
        }
    return make_group(FiniteGroup::from_table(t, "D4"));
}

std::vector<GroupPtr> group_fixtures() {
    std::vector<GroupPtr> out;
    for (int m = 1; m <= 8; ++m) out.push_back(make_cyclic(m));
    out.push_back(make_symmetric(3));
    auto z2 = make_cyclic(2);
    auto v4 = product_group(z2, z2, "Z2xZ2");
    out.push_back(v4);
    out.push_back(product_group(v4, z2, "Z2xZ2xZ2"));
    out.push_back(product_group(z2, make_cyclic(4), "Z2xZ4"));
    out.push_back(dihedral4());
    return out;
}

Element seq_label(const LabeledGraph& g, const Seq& s) {
    Element l = g.G().identity();
    for (auto [id, fwd] : s) {
        Element e = g.edge(id).label;
        l = g.G().mul(l, fwd ? e : g.G().inv(e));
    }
    return l;
}

Trail to_trail(const Seq& s) {
    Trail t;
    for (auto [id, fwd] : s) t.steps.push_back({id, fwd});
    return t;
}

Outcome criterion1() {
    Outcome o;
    std::mt19937_64 rng(101);
    long checks = 0;
    for (const auto& g : group_fixtures()) {
        const int q = g->order();
        for (Element a = 0; a < q; ++a) {
            o.check(g->mul(a, g->inv(a)) == g->identity() && g->mul(g->inv(a), a) == g->identity(),
                    g->name() + " inverse");
            for (Element b = 0; b < q; ++b)
                for (Element c = 0; c < q; ++c, ++checks)
                    o.check(g->mul(g->mul(a, b), c) == g->mul(a, g->mul(b, c)), g->name() + " associativity");
        }
        for (const auto& s : all_subgroups(g)) {
            o.check(q % s.size() == 0, g->name() + " Lagrange");
            o.check(static_cast<int>(right_coset_representatives(s).size()) * s.size() == q,
                    g->name() + " coset count");
        }
        for (int rep = 0; rep < 25; ++rep) {
            auto lg = gftest::random_graph(rng, g, 4, 7);
            ShiftAssignment s(4), inv(4);
            for (int v = 0; v < 4; ++v) {
                s[v] = static_cast<Element>(rng() % q);
                inv[v] = g->inv(s[v]);
            }
            o.check(apply_shift(apply_shift(lg, s), inv) == lg, g->name() + " shift round-trip");
            for (const auto& c : gftest::qualifying_circuits(lg, 0, {})) {
                Trail t = to_trail(c);
                ++checks;
                o.check(trail_label(lg, inverse(t)) == g->inv(trail_label(lg, t)), g->name() + " inverse trail");
                o.check(trail_label(lg, t) == seq_label(lg, c), g->name() + " trail label");
            }
        }
    }
    o.summary = std::to_string(group_fixtures().size()) + " groups, " + std::to_string(checks) + " identities";
    return o;
}

Outcome criterion2() {
    Outcome o;
    long words = 0;
    for (const auto& g : group_fixtures()) {
        const int q = g->order();
        for (unsigned mask = 1; mask < (1u << q); ++mask) {
            std::vector<Element> gens;
            for (int a = 0; a < q; ++a)
                if (mask >> a & 1u) gens.push_back(a);
            if (generate_subgroup(g, gens).size() != q) continue;
            for (Element t = 0; t < q; ++t, ++words) {
                auto w = word_over_generators(g, gens, t);
                o.check(product(*g, w) == t, g->name() + " word product");
                o.check(static_cast<int>(w.size()) <= q, g->name() + " word longer than |G|");
                o.check(static_cast<int>(w.size()) == gftest::shortest_word_length(*g, gens, t, q),
                        g->name() + " word not shortest");
            }
        }
    }
    o.summary = std::to_string(words) + " words over every generating set";
    return o;
}

// ------------------------------------------------------------ immersions

// Canonical key of a Z_q graph on 3 vertices under vertex permutations and
// shifts, so each isomorphism class is tested once.
std::vector<std::tuple<int, int, int>> canonical_key(const GroupPtr& grp, int nv,
                                                     const std::vector<std::tuple<int, int, int>>& es) {
    std::vector<int> perm(nv);
    std::vector<std::tuple<int, int, int>> best;
    bool first = true;
    for (int i = 0; i < nv; ++i) perm[i] = i;
    const int q = grp->order();
    int shifts = 1;
    for (int i = 0; i < nv; ++i) shifts *= q;
    do {
        for (int sc = 0; sc < shifts; ++sc) {
            std::vector<Element> sig(nv);
            int c = sc;
            for (int i = 0; i < nv; ++i) {
                sig[i] = c % q;
                c /= q;
            }
            std::vector<std::tuple<int, int, int>> k;
            for (auto [a, b, l] : es) {
                int pa = perm[a], pb = perm[b];
                Element nl = grp->mul(grp->mul(sig[pa], l), grp->inv(sig[pb]));
                if (pa > pb) {
                    std::swap(pa, pb);
                    nl = grp->inv(nl);
                } else if (pa == pb) {
                    nl = std::min(nl, grp->inv(nl));
                }
                k.emplace_back(pa, pb, nl);
            }
            std::sort(k.begin(), k.end());
            if (first || k < best) best = k;
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// All graphs on nv vertices with at most max_edges edges over grp, one per
// class.
std::vector<LabeledGraph> exhaustive_family(const GroupPtr& grp, int nv, int max_edges) {
    std::vector<std::tuple<int, int, int>> types;
    for (int a = 0; a < nv; ++a)
        for (int b = a; b < nv; ++b)
            for (int l = 0; l < grp->order(); ++l)
                if (a != b || l <= grp->inv(l)) types.emplace_back(a, b, l);
    std::set<std::vector<std::tuple<int, int, int>>> seen;
    std::vector<LabeledGraph> out;
    std::vector<std::tuple<int, int, int>> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (seen.insert(canonical_key(grp, nv, cur)).second) out.push_back(graph_of(grp, nv, cur));
        if (static_cast<int>(cur.size()) == max_edges) return;
        for (std::size_t i = from; i < types.size(); ++i) {
            cur.push_back(types[i]);
            rec(i);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

Outcome criterion3() {
    Outcome o;
    long pairs = 0, found = 0;
    auto compare = [&](const LabeledGraph& g, const LabeledGraph& h, const std::string& tag) {
        if (h.vertex_count() > g.vertex_count()) return;
        ++pairs;
        auto r = find_immersion(g, h, SearchBudget{50'000'000});
        o.check(r.status != SearchStatus::Unknown, tag + ": search exhausted its budget");
        if (r.status == SearchStatus::Unknown) return;
        bool lib = r.status == SearchStatus::Found;
        if (lib) {
            ++found;
            o.check(verify_immersion(g, h, *r.immersion).ok(), tag + ": returned immersion fails verification");
        }
        bool ref = gftest::immerses(g, h);
        if (lib != ref) {
            std::ostringstream ss;
            ss << tag << ": engine " << lib << " oracle " << ref << " host";
            for (const Edge& e : g.edges()) ss << " " << e.tail << "-" << e.head << ":" << e.label;
            ss << " pattern";
            for (const Edge& e : h.edges()) ss << " " << e.tail << "-" << e.head << ":" << e.label;
            o.check(false, ss.str());
        }
    };

    // Exhaustive part: every host on 3 vertices with at most 6 edges over Z1
    // and Z2 (up to isomorphism and shifting) against every pattern on at
    // most 2 vertices with at most 2 edges, plus the odd triangle and the
    // rich (Z2, 1, 2)-flower.
    long hosts = 0;
    for (int q = 1; q <= 2; ++q) {
        auto grp = make_cyclic(q);
        auto family = exhaustive_family(grp, 3, 6);
        std::vector<LabeledGraph> patterns;
        for (int nv = 1; nv <= 2; ++nv)
            for (auto& p : exhaustive_family(grp, nv, 2)) patterns.push_back(p);
        if (q == 2) {
            patterns.push_back(graph_of(grp, 3, {{0, 1, 1}, {1, 2, 0}, {2, 0, 0}}));
            patterns.push_back(build_flower({FlowerKind::Rich, 1, 2, grp, {}, {}}));
        }
        hosts += static_cast<long>(family.size());
        for (const auto& g : family)
            for (const auto& h : patterns) compare(g, h, "Z" + std::to_string(q) + " exhaustive");
    }

    // Random part: 200 pairs, |E(g)| <= 8, |G| <= 3.
    std::mt19937_64 rng(103);
    for (int rep = 0; rep < 200; ++rep) {
        auto grp = make_cyclic(1 + rep % 3);
        int gv = 2 + static_cast<int>(rng() % 3);
        int ge = 4 + static_cast<int>(rng() % 5);
        auto g = gftest::random_graph(rng, grp, gv, ge);
        int hv = 1 + static_cast<int>(rng() % std::min(gv, 3));
        int he = 1 + static_cast<int>(rng() % 3);
        auto h = gftest::random_graph(rng, grp, hv, he);
        compare(g, h, "random #" + std::to_string(rep));
    }
    o.summary = std::to_string(pairs) + " pairs (" + std::to_string(hosts) + " exhaustive hosts), " +
                std::to_string(found) + " immersions found";
    return o;
}

// ------------------------------------------------------------- packings

bool circuit_ok(const LabeledGraph& g, Vertex x, const std::vector<Element>& sub, const Trail& t) {
    if (t.empty()) return false;
    Vertex at = x;
    std::set<int> used;
    Element l = g.G().identity();
    for (OrientedEdge s : t.steps) {
        if (!g.has_edge(s.edge) || !used.insert(s.edge).second) return false;
        const Edge& e = g.edge(s.edge);
        Vertex from = s.forward ? e.tail : e.head, to = s.forward ? e.head : e.tail;
        if (from != at) return false;
        at = to;
        l = g.G().mul(l, s.forward ? e.label : g.G().inv(e.label));
    }
    return at == x && !gftest::in_set(sub, l);
}

Outcome criterion4() {
    Outcome o;
    std::mt19937_64 rng(107);
    int packs = 0, covers = 0;
    for (int rep = 0; rep < 100; ++rep) {
        auto grp = make_cyclic(2 + rep % 2);
        auto sub = generate_subgroup(grp, std::vector<Element>{});
        int nv = 2 + static_cast<int>(rng() % 3);
        int ne = 3 + static_cast<int>(rng() % 6);
        auto g = gftest::random_graph(rng, grp, nv, ne);
        int r = 1 + static_cast<int>(rng() % 3);
        std::string tag = "instance " + std::to_string(rep);
        PackOrCover pc;
        try {
            pc = erdos_posa(g, 0, sub, r);
        } catch (const Error& e) {
            o.check(false, tag + ": " + e.what());
            continue;
        }
        int best = gftest::max_packing(g, 0, sub.elements());
        o.check(pc.packing.has_value() != pc.cover.has_value(), tag + ": not exactly one variant");
        if (pc.packing) {
            ++packs;
            const auto& cs = pc.packing->circuits;
            o.check(static_cast<int>(cs.size()) == r, tag + ": packing size");
            std::set<int> used;
            for (const Trail& t : cs) {
                o.check(circuit_ok(g, 0, sub.elements(), t), tag + ": packing circuit invalid");
                for (auto s : t.steps) o.check(used.insert(s.edge).second, tag + ": circuits share an edge");
            }
        } else if (pc.cover) {
            ++covers;
            o.check(best < r, tag + ": cover returned although " + std::to_string(r) + " circuits pack");
            o.check(static_cast<int>(pc.cover->size()) <= 2 * r - 2, tag + ": cover larger than 2r-2");
            std::set<int> x(pc.cover->begin(), pc.cover->end());
            for (const auto& s : gftest::qualifying_edge_sets(g, 0, sub.elements()))
                o.check(std::any_of(s.begin(), s.end(), [&](int id) { return x.count(id) > 0; }),
                        tag + ": cover misses a qualifying circuit");
            int minimum = gftest::min_cover(g, 0, sub.elements(), 2 * r - 2);
            o.check(minimum >= 0 && minimum <= static_cast<int>(x.size()), tag + ": cover below brute-force minimum");
        }
    }
    o.summary = std::to_string(packs) + " packings, " + std::to_string(covers) + " covers certified";
    return o;
}

Outcome criterion5() {
    Outcome o;
    std::mt19937_64 rng(109);
    std::vector<GroupPtr> groups{make_cyclic(2), make_cyclic(3), make_symmetric(3)};
    long matched = 0;
    for (int rep = 0; rep < 50; ++rep) {
        auto grp = groups[rep % groups.size()];
        int nv = 2 + static_cast<int>(rng() % 3);
        auto g = gftest::random_graph(rng, grp, nv, 3 + static_cast<int>(rng() % 4));
        const Vertex x = 0;
        auto gad = vertex_split_gadget(g, x);
        const LabeledGraph& h = gad.graph;
        std::string tag = "instance " + std::to_string(rep);

        // Circuits at x that meet x only at their ends.
        std::set<Seq> circuits;
        for (const auto& c : gftest::qualifying_circuits(g, x, {})) {
            Vertex at = x;
            bool inner = false;
            for (std::size_t i = 0; i + 1 < c.size(); ++i) {
                const Edge& e = g.edge(c[i].first);
                at = c[i].second ? e.head : e.tail;
                inner = inner || at == x;
            }
            if (!inner) circuits.insert(c);
        }

        // A-paths: vertex-simple paths between distinct terminals with no
        // inner terminal, read off as their sequence of matching edges.
        std::vector<char> terminal(h.vertex_count(), 0), seen(h.vertex_count(), 0);
        for (Vertex a : gad.terminals) terminal[a] = 1;
        std::set<Seq> paths;
        Seq cur;
        std::function<void(Vertex, Vertex)> dfs = [&](Vertex start, Vertex at) {
            if (at != start && terminal[at]) {
                if (!cur.empty()) paths.insert(cur);
                return;
            }
            for (const Edge& e : h.edges()) {
                for (int d = 0; d < 2; ++d) {
                    Vertex from = d ? e.head : e.tail, to = d ? e.tail : e.head;
                    if (from != at || seen[to] || e.is_loop()) continue;
                    int orig = gad.original_edge[e.id];
                    seen[to] = 1;
                    if (orig >= 0) cur.emplace_back(orig, from == 2 * g.position(orig));
                    dfs(start, to);
                    if (orig >= 0) cur.pop_back();
                    seen[to] = 0;
                }
            }
        };
        for (Vertex a : gad.terminals) {
            seen[a] = 1;
            dfs(a, a);
            seen[a] = 0;
        }
        o.check(circuits == paths, tag + ": " + std::to_string(circuits.size()) + " circuits vs " +
                                       std::to_string(paths.size()) + " A-paths");
        // Labels carry over because clique edges are identity-labeled.
        for (const Edge& e : h.edges())
            if (gad.original_edge[e.id] < 0) o.check(e.label == grp->identity(), tag + ": clique label");
        matched += static_cast<long>(circuits.size());
    }
    o.summary = "50 gadgets, " + std::to_string(matched) + " circuit/A-path pairs";
    return o;
}

// Vertices of x's edge-block by brute force: 2-edge-connected to x.
VertexSet block_by_brute_force(const LabeledGraph& g, Vertex x) {
    Multigraph m = g.underlying();
    VertexSet b{x};
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (v != x && gftest::edge_connectivity(m, x, v) >= 2) b.push_back(v);
    return b;
}

Outcome criterion6() {
    Outcome o;
    std::mt19937_64 rng(113);
    struct Case {
        GroupPtr grp;
        std::vector<Element> gens;
    };
    auto z4 = make_cyclic(4), s3 = make_symmetric(3), z2 = make_cyclic(2);
    std::vector<Case> cases{{z2, {}}, {z4, {2}}, {s3, {1}}, {s3, {3}}};
    int done = 0, tries = 0, nontrivial = 0;
    while (done < 50 && tries < 100000) {
        ++tries;
        const Case& c = cases[tries % cases.size()];
        Subgroup sub = generate_subgroup(c.grp, c.gens);
        int nv = 3 + static_cast<int>(rng() % 3);
        LabeledGraph g = gftest::random_graph(rng, c.grp, nv, 4 + static_cast<int>(rng() % 4));
        if (tries % 2 == 0) {
            // Planted: labels in the subgroup, then a shift fixing x.
            std::vector<Edge> es = g.edges();
            for (Edge& e : es) e.label = sub.elements()[rng() % sub.size()];
            ShiftAssignment s(nv, 0);
            for (int v = 1; v < nv; ++v) s[v] = static_cast<Element>(rng() % c.grp->order());
            g = apply_shift(LabeledGraph(c.grp, g.vertex_names(), es), s);
        }
        if (!gftest::qualifying_circuits(g, 0, sub.elements()).empty()) continue;
        ++done;
        std::string tag = "instance " + std::to_string(done);
        ShiftAssignment s;
        try {
            s = relabel_edge_block(g, 0, sub);
        } catch (const Error& e) {
            o.check(false, tag + ": " + e.what());
            continue;
        }
        o.check(s.at(0) == c.grp->identity(), tag + ": shift moves x");
        auto b = block_by_brute_force(g, 0);
        auto in = membership(b, nv);
        bool moved = false;
        for (const Edge& e : g.edges()) {
            if (!in[e.tail] || !in[e.head]) continue;
            Element l = c.grp->mul(c.grp->mul(s[e.tail], e.label), c.grp->inv(s[e.head]));
            o.check(sub.contains(l), tag + ": edge " + std::to_string(e.id) + " still outside the subgroup");
            moved = moved || !sub.contains(e.label);
        }
        if (moved) ++nontrivial;
    }
    o.check(done == 50, "only " + std::to_string(done) + " instances satisfied the precondition");
    o.summary = std::to_string(done) + " instances, " + std::to_string(nontrivial) + " needed relabeling";
    return o;
}

// --------------------------------------------------------------- uncross

using TransKey = std::pair<Step, Step>;

Step rev(Step s) { return {s.first, !s.second}; }

TransKey canon_transition(Step a, Step b) {
    TransKey k1{a, b}, k2{rev(b), rev(a)};
    return std::min(k1, k2);
}

int foreign(const std::vector<Seq>& circuits, const std::set<TransKey>& im) {
    int n = 0;
    for (const auto& c : circuits)
        for (std::size_t i = 0; i + 1 < c.size(); ++i)
            if (!im.count(canon_transition(c[i], c[i + 1]))) ++n;
    return n;
}

// Smallest foreign-transition count over every set of r pairwise
// edge-disjoint qualifying circuits at x.
int exhaustive_minimum(const LabeledGraph& g, Vertex x, const std::vector<Element>& sub, int r,
                       const std::set<TransKey>& im) {
    auto all = gftest::qualifying_circuits(g, x, sub);
    int best = -1;
    std::vector<Seq> chosen;
    std::set<int> used;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (static_cast<int>(chosen.size()) == r) {
            int f = foreign(chosen, im);
            if (best < 0 || f < best) best = f;
            return;
        }
        for (std::size_t i = from; i < all.size(); ++i) {
            const Seq& c = all[i];
            if (std::any_of(c.begin(), c.end(), [&](Step s) { return used.count(s.first) > 0; })) continue;
            for (auto s : c) used.insert(s.first);
            chosen.push_back(c);
            rec(i + 1);
            chosen.pop_back();
            for (auto s : c) used.erase(s.first);
        }
    };
    rec(0);
    return best;
}

struct UncrossFixture {
    LabeledGraph g;
    LabeledGraph pattern;
    Immersion im;
    SimpleFlower sf;
};

// Z2 host: center 0, petal i reached by a branch trail of identity edges.
// Circuit j (odd) enters trail j at an inner vertex, follows one or two
// trail edges and returns to the center by a private path.
UncrossFixture make_uncross_fixture(std::mt19937_64& rng, int r, int extra_petals) {
    auto z2 = make_cyclic(2);
    const int n = r + extra_petals;
    std::vector<std::tuple<int, int, int>> es;
    int nv = 1;
    std::vector<std::vector<int>> trail_edges(n);
    std::vector<std::vector<int>> trail_vertices(n);
    std::vector<Vertex> petal(n);
    for (int i = 0; i < n; ++i) {
        int len = 2 + static_cast<int>(rng() % 3);
        Vertex prev = 0;
        trail_vertices[i].push_back(0);
        for (int s = 0; s < len; ++s) {
            Vertex next = nv++;
            trail_edges[i].push_back(static_cast<int>(es.size()));
            es.emplace_back(prev, next, 0);
            trail_vertices[i].push_back(next);
            prev = next;
        }
        petal[i] = prev;
    }
    std::vector<Seq> circuits;
    for (int j = 0; j < r; ++j) {
        const int len = static_cast<int>(trail_edges[j].size());
        // Enter at trail vertex a (1 <= a), use trail edges a..b-1.
        int a = 1 + static_cast<int>(rng() % (len - 1));
        int b = std::min(len, a + 1 + static_cast<int>(rng() % 2));
        Seq c;
        Vertex in = nv++;
        c.emplace_back(static_cast<int>(es.size()), true);
        es.emplace_back(0, in, 1);
        c.emplace_back(static_cast<int>(es.size()), true);
        es.emplace_back(in, trail_vertices[j][a], 0);
        for (int s = a; s < b; ++s) c.emplace_back(trail_edges[j][s], true);
        Vertex out = nv++;
        c.emplace_back(static_cast<int>(es.size()), true);
        es.emplace_back(trail_vertices[j][b], out, 0);
        c.emplace_back(static_cast<int>(es.size()), true);
        es.emplace_back(out, 0, 0);
        circuits.push_back(c);
    }
    UncrossFixture f;
    f.g = graph_of(z2, nv, es);
    f.pattern = build_flower({FlowerKind::Plain, 1, n, z2, {}, {}});
    f.im.vertex_map.push_back(0);
    for (int i = 0; i < n; ++i) {
        f.im.vertex_map.push_back(petal[i]);
        Trail t;
        for (int e : trail_edges[i]) t.steps.push_back({e, true});
        f.im.trails.push_back(t);
    }
    f.im.shift.assign(nv, 0);
    f.sf.center = 0;
    for (const auto& c : circuits) f.sf.circuits.push_back(to_trail(c));
    return f;
}

Outcome criterion7() {
    Outcome o;
    std::mt19937_64 rng(127);
    int fixtures = 0, rewrites = 0;
    for (int rep = 0; rep < 30; ++rep) {
        int r = 1 + rep % 3;
        auto f = make_uncross_fixture(rng, r, rep % 2);
        std::string tag = "fixture " + std::to_string(rep);
        auto sub = generate_subgroup(f.g.group(), std::vector<Element>{});
        if (!verify_immersion(f.g, f.pattern, f.im).ok()) {
            o.check(false, tag + ": fixture immersion invalid");
            continue;
        }
        ++fixtures;
        UncrossResult res;
        try {
            res = uncross_flower(f.g, f.pattern, f.im, sub, f.sf);
        } catch (const Error& e) {
            o.check(false, tag + ": " + e.what());
            continue;
        }
        rewrites += res.rewrites;
        std::vector<Seq> out;
        std::set<int> used;
        for (const Trail& t : res.flower.circuits) {
            o.check(circuit_ok(f.g, 0, sub.elements(), t), tag + ": output circuit invalid");
            Seq s;
            for (auto st : t.steps) {
                s.emplace_back(st.edge, st.forward);
                o.check(used.insert(st.edge).second, tag + ": output circuits share an edge");
            }
            out.push_back(s);
        }
        o.check(static_cast<int>(out.size()) == r, tag + ": size changed");
        int crossing = 0;
        for (const Trail& t : f.im.trails)
            if (std::any_of(t.steps.begin(), t.steps.end(), [&](OrientedEdge s) { return used.count(s.edge) > 0; }))
                ++crossing;
        o.check(crossing <= 2 * r, tag + ": " + std::to_string(crossing) + " branch trails crossed");
        std::set<TransKey> im_tr;
        for (const Trail& t : f.im.trails)
            for (std::size_t i = 0; i + 1 < t.size(); ++i)
                im_tr.insert(canon_transition({t.steps[i].edge, t.steps[i].forward},
                                              {t.steps[i + 1].edge, t.steps[i + 1].forward}));
        int got = foreign(out, im_tr);
        int best = exhaustive_minimum(f.g, 0, sub.elements(), r, im_tr);
        o.check(got == best, tag + ": " + std::to_string(got) + " foreign transitions, minimum " + std::to_string(best));
        for (std::size_t i = 1; i < res.potentials.size(); ++i)
            o.check(res.potentials[i] < res.potentials[i - 1], tag + ": potential did not decrease");
    }
    o.summary = std::to_string(fixtures) + " fixtures, " + std::to_string(rewrites) + " rewrites";
    return o;
}

// ----------------------------------------------------------------- value

Outcome criterion8() {
    Outcome o;
    std::mt19937_64 rng(131);
    auto z2 = make_cyclic(2);
    std::vector<GroupPtr> small{z2, make_cyclic(3), make_cyclic(4), product_group(z2, z2, "Z2xZ2")};
    for (int rep = 0; rep < 500; ++rep) {
        auto grp = small[rep % small.size()];
        int nv = 3 + static_cast<int>(rng() % 5);
        auto g = gftest::random_graph(rng, grp, nv, nv + static_cast<int>(rng() % 6));
        VertexSet a, b, amb, bma;
        for (int v = 0; v < nv; ++v) {
            bool ia = rng() % 2, ib = rng() % 2;
            if (ia) a.push_back(v);
            if (ib) b.push_back(v);
            if (ia && !ib) amb.push_back(v);
            if (ib && !ia) bma.push_back(v);
        }
        int lhs = set_value(g, a).value + set_value(g, b).value;
        int rhs = set_value(g, amb).value + set_value(g, bma).value;
        o.check(lhs >= rhs, "posimodularity fails on pair " + std::to_string(rep));
    }
    std::vector<GroupPtr> groups{z2,           make_cyclic(3), make_cyclic(4),
                                 make_cyclic(5), make_cyclic(6), make_symmetric(3),
                                 small[3]};
    int compared = 0;
    for (int rep = 0; rep < 350; ++rep) {
        auto grp = groups[rep % groups.size()];
        int nv = 2 + static_cast<int>(rng() % 4);
        auto g = gftest::random_graph(rng, grp, nv, 2 + static_cast<int>(rng() % 7));
        VertexSet bag;
        for (int v = 0; v < nv && bag.size() < 4; ++v)
            if (rng() % 3) bag.push_back(v);
        auto sv = set_value(g, bag);
        ++compared;
        o.check(sv.value == gftest::set_value(g, bag), grp->name() + " value differs from brute force, case " +
                                                           std::to_string(rep));
        o.check(certificate_problem(g, sv.certificate).empty() && certificate_value(g, sv.certificate) == sv.value,
                "witness certificate inconsistent, case " + std::to_string(rep));
    }
    o.summary = "500 posimodular pairs, " + std::to_string(compared) + " values against brute force";
    return o;
}

// --------------------------------------------------------- decomposition

bool partitions(int nv, const TreeCutDecomposition& d) {
    std::vector<int> hit(nv, 0);
    for (const auto& b : d.bags)
        for (Vertex v : b) {
            if (v < 0 || v >= nv) return false;
            ++hit[v];
        }
    return std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; });
}

// Random 2-edge-connected graph whose labels mostly follow a hidden shift.
LabeledGraph near_balanced(std::mt19937_64& rng, const GroupPtr& grp, int nv, int chords, int noise) {
    auto g = gftest::random_bridgeless(rng, grp, nv, chords);
    std::vector<Edge> es = g.edges();
    for (Edge& e : es) e.label = grp->identity();
    for (int i = 0; i < noise && !es.empty(); ++i) es[rng() % es.size()].label = static_cast<Element>(rng() % grp->order());
    ShiftAssignment s(nv);
    for (int v = 0; v < nv; ++v) s[v] = static_cast<Element>(rng() % grp->order());
    return apply_shift(LabeledGraph(grp, g.vertex_names(), es), s);
}

Outcome criterion9() {
    Outcome o;
    std::mt19937_64 rng(137);
    int built = 0, tries = 0, no_container = 0, certified = 0;
    std::vector<GroupPtr> groups{make_cyclic(2), make_cyclic(3)};
    while (built < 50 && tries < 500) {
        ++tries;
        auto grp = groups[tries % 2];
        int nv = 4 + static_cast<int>(rng() % 9);
        int chords = nv / 2 + static_cast<int>(rng() % (2 * nv));
        auto g = tries % 3 == 0 ? gftest::random_bridgeless(rng, grp, nv, chords)
                                : near_balanced(rng, grp, nv, chords, static_cast<int>(rng() % 3));
        DecomposeOptions opt;
        opt.override_t = 3 + static_cast<int>(rng() % 4);
        opt.n = 1 + static_cast<int>(rng() % 2);
        std::string tag = "fixture " + std::to_string(tries);
        DecomposeResult d;
        try {
            d = structure_decompose(g, opt);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Precondition) {
                ++no_container;
                continue;
            }
            o.check(false, tag + ": " + e.what());
            continue;
        }
        if (d.rich) continue;
        ++built;
        o.check(partitions(nv, d.tree), tag + ": bags do not partition V");
        o.check(decomposition_problem(nv, d.tree).empty(), tag + ": not a tree-cut decomposition");
        auto rep = verify_structure(g, d.shift, d.tree, *opt.override_t, d.outcome_bound);
        o.check(rep.ok, tag + ": verify_structure rejects it");
        for (const auto& b : rep.bags) {
            o.check(b.outcome != BagOutcome::Neither, tag + ": bag with neither outcome");
            if (b.outcome != BagOutcome::Certified || !b.certificate) continue;
            ++certified;
            const Certificate& c = *b.certificate;
            // Recount the certificate independently.
            auto in = membership(c.bag, nv);
            std::set<int> x(c.edges.begin(), c.edges.end());
            int boundary = 0, inner_x = 0;
            for (const Edge& e : g.edges()) {
                bool t = in[e.tail], h = in[e.head];
                if (t != h) {
                    ++boundary;
                    o.check(x.count(e.id) > 0, tag + ": boundary edge outside X");
                } else if (t) {
                    if (x.count(e.id)) {
                        ++inner_x;
                        continue;
                    }
                    Element l = grp->mul(grp->mul(c.shift[e.tail], e.label), grp->inv(c.shift[e.head]));
                    o.check(c.subgroup.contains(l), tag + ": inner edge outside the subgroup and not in X");
                }
            }
            o.check(boundary + 2 * inner_x <= *opt.override_t, tag + ": certificate value above t");
        }
    }
    o.check(built == 50, "only " + std::to_string(built) + " decompositions built");
    o.summary = std::to_string(built) + " decompositions verified (" + std::to_string(certified) +
                " certified bags; " + std::to_string(no_container) + " fixtures without a container skipped)";
    return o;
}

Outcome criterion10() {
    Outcome o;
    std::mt19937_64 rng(139);
    auto z2 = make_cyclic(2);
    int done = 0, tries = 0;
    std::map<int, int> by_t;
    int best_lambda = 0;
    while (done < 20 && tries < 2000) {
        ++tries;
        // Dense enough that some vertex pairs carry many edge-disjoint
        // trails, so the search cannot stop at the connectivity bound.
        int nv = 3 + static_cast<int>(rng() % 5);
        int chords = nv + static_cast<int>(rng() % (2 * nv));
        auto g = tries % 2 ? near_balanced(rng, z2, nv, chords, static_cast<int>(rng() % 3))
                           : gftest::random_bridgeless(rng, z2, nv, chords);
        int t = 2 + static_cast<int>(rng() % 3);
        DecomposeOptions opt;
        opt.override_t = t;
        opt.n = 1;
        opt.outcome_bound = 1;
        DecomposeResult d;
        try {
            d = structure_decompose(g, opt);
        } catch (const Error& e) {
            continue;
        }
        if (d.rich || !verify_structure(g, d.shift, d.tree, t, 1).ok) continue;
        ++done;
        ++by_t[t];
        Tri r = check_converse(g, d.shift, d.tree, t, 1, SearchBudget{200'000'000});
        // Largest pairwise connectivity, to show the pattern was plausible.
        Multigraph m = g.underlying();
        for (Vertex u = 0; u < nv; ++u)
            for (Vertex v = u + 1; v < nv; ++v) best_lambda = std::max(best_lambda, edge_connectivity(m, u, v));
        o.check(r == Tri::True, "fixture " + std::to_string(tries) + " at t=" + std::to_string(t) +
                                    ": forbids = " + to_string(r));
    }
    o.check(done == 20, "only " + std::to_string(done) + " verified fixtures");
    std::string per;
    for (auto [t, c] : by_t) per += " t=" + std::to_string(t) + ":" + std::to_string(c);
    o.summary = std::to_string(done) + " verified decompositions, rich flower forbidden in all (" + per.substr(1) +
                "; max pair connectivity " + std::to_string(best_lambda) + ")";
    return o;
}

Outcome criterion11() {
    Outcome o;
    auto z2 = make_cyclic(2);
    auto g = graph_of(z2, 3, {{0, 1, 1}, {1, 2, 0}, {2, 0, 0}, {0, 1, 0}});
    DecomposeOptions opt;
    auto d = structure_decompose(g, opt);
    o.check(d.t == 512, "structure_decompose reports t = " + std::to_string(d.t));
    o.check(d.theorem_t == 512, "theorem t differs");
    o.check(!d.t_overridden, "t marked overridden");
    o.check(theorem_t(2, 1, 1) == 4LL * 1 * 1 * 128, "formula");
    o.summary = "t = " + std::to_string(d.t) + " for (Z2, k=1, n=1)";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        std::function<Outcome()> run;
        double limit_seconds;
    };
    const std::vector<Criterion> criteria{
        {"group and label algebra", criterion1, 10},
        {"word length bound", criterion2, 10},
        {"immersion oracle equivalence", criterion3, 300},
        {"circuit packing/cover duality", criterion4, 300},
        {"gadget circuit/A-path correspondence", criterion5, 60},
        {"edge-block relabeling", criterion6, 60},
        {"uncrossing", criterion7, 120},
        {"value function", criterion8, 300},
        {"decomposition soundness", criterion9, 300},
        {"converse", criterion10, 600},
        {"theorem t spot value", criterion11, 60},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("uncaught: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > criteria[i].limit_seconds) {
            o.pass = false;
            o.failures.push_back("over the time limit of " + std::to_string(static_cast<int>(criteria[i].limit_seconds)) + " s");
        }
        std::printf("%s %zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(),
                    o.summary.c_str(), secs);
        for (const auto& f : o.failures) std::printf("    %s\n", f.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
