#include "gammaforge/selftest.hpp"

#include <functional>
#include <random>

#include "gammaforge/conn.hpp"
#include "gammaforge/decomp.hpp"
#include "gammaforge/error.hpp"
#include "gammaforge/group.hpp"
#include "gammaforge/immerse.hpp"
#include "gammaforge/lgraph.hpp"
#include "gammaforge/pack.hpp"

namespace gammaforge {

namespace {

std::vector<GroupPtr> fixtures() {
    std::vector<GroupPtr> out;
    for (int m = 1; m <= 8; ++m) out.push_back(make_cyclic(m));
    out.push_back(make_symmetric(3));
    return out;
}

LabeledGraph random_graph(std::mt19937_64& rng, const GroupPtr& grp, int vertices, int edges) {
    std::uniform_int_distribution<int> pick(0, vertices - 1), lab(0, grp->order() - 1);
    std::vector<std::string> names;
    for (int i = 0; i < vertices; ++i) names.push_back("v" + std::to_string(i));
    std::vector<Edge> es;
    for (int i = 0; i < edges; ++i) es.push_back({i, pick(rng), pick(rng), lab(rng)});
    return LabeledGraph(grp, names, es);
}

// A cycle through every vertex plus random chords, so the result is
// 2-edge-connected.
LabeledGraph random_bridgeless(std::mt19937_64& rng, const GroupPtr& grp, int vertices, int chords) {
    std::uniform_int_distribution<int> pick(0, vertices - 1), lab(0, grp->order() - 1);
    std::vector<std::string> names;
    for (int i = 0; i < vertices; ++i) names.push_back("v" + std::to_string(i));
    std::vector<Edge> es;
    for (int i = 0; i < vertices; ++i) es.push_back({i, i, (i + 1) % vertices, lab(rng)});
    for (int i = 0; i < chords; ++i) {
        int a = pick(rng), b = pick(rng);
        if (a != b) es.push_back({static_cast<int>(es.size()), a, b, lab(rng)});
    }
    return LabeledGraph(grp, names, es);
}

SelftestCheck check(const std::string& name, const std::function<std::string()>& body) {
    SelftestCheck c{name, false, {}};
    try {
        c.detail = body();
        c.passed = c.detail.empty();
    } catch (const std::exception& e) {
        c.detail = std::string("exception: ") + e.what();
    }
    return c;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed) {
    std::vector<SelftestCheck> out;
    std::mt19937_64 rng(seed);

    out.push_back(check("group-axioms", [] {
        for (const auto& g : fixtures()) {
            const int q = g->order();
            for (Element a = 0; a < q; ++a) {
                if (g->mul(a, g->inv(a)) != g->identity()) return "inverse fails in " + g->name();
                for (Element b = 0; b < q; ++b)
                    for (Element c = 0; c < q; ++c)
                        if (g->mul(g->mul(a, b), c) != g->mul(a, g->mul(b, c)))
                            return "associativity fails in " + g->name();
            }
            for (const Subgroup& h : all_subgroups(g))
                if (q % h.size() != 0) return "Lagrange fails in " + g->name();
        }
        return std::string();
    }));

    out.push_back(check("word-length", [] {
        for (const auto& g : fixtures()) {
            const int q = g->order();
            if (q > 6) continue;
            for (unsigned mask = 1; mask < (1u << q); ++mask) {
                std::vector<Element> gens;
                for (int a = 0; a < q; ++a)
                    if (mask >> a & 1u) gens.push_back(a);
                if (generate_subgroup(g, gens).size() != q) continue;
                for (Element t = 0; t < q; ++t) {
                    auto w = word_over_generators(g, gens, t);
                    if (static_cast<int>(w.size()) > q || product(*g, w) != t)
                        return "bad word in " + g->name();
                }
            }
        }
        return std::string();
    }));

    out.push_back(check("shift-round-trip", [&rng] {
        auto s3 = make_symmetric(3);
        for (int i = 0; i < 30; ++i) {
            LabeledGraph g = random_graph(rng, s3, 4, 6);
            Vertex v = static_cast<Vertex>(rng() % 4);
            Element a = static_cast<Element>(rng() % 6);
            if (!(shift(shift(g, v, a), v, s3->inv(a)) == g)) return std::string("shift round-trip failed");
        }
        return std::string();
    }));

    out.push_back(check("immersion-soundness", [&rng] {
        auto z2 = make_cyclic(2);
        for (int i = 0; i < 20; ++i) {
            LabeledGraph g = random_graph(rng, z2, 4, 5);
            LabeledGraph h = random_graph(rng, z2, 2, 2);
            if (!verify_immersion(g, g, identity_immersion(g)).ok()) return std::string("identity immersion rejected");
            auto r = find_immersion(g, h, {200'000});
            if (r.status == SearchStatus::Found && !verify_immersion(g, h, *r.immersion).ok())
                return std::string("search returned an invalid immersion");
        }
        return std::string();
    }));

    out.push_back(check("packing-cover-certified", [&rng] {
        for (int i = 0; i < 20; ++i) {
            auto grp = make_cyclic(2 + static_cast<int>(rng() % 2));
            LabeledGraph g = random_graph(rng, grp, 4, 6);
            Subgroup sub = generate_subgroup(grp, std::vector<Element>{});
            int r = 1 + static_cast<int>(rng() % 3);
            PackOrCover pc = erdos_posa(g, 0, sub, r);
            if (pc.packing && !simple_flower_problem(g, 0, sub, *pc.packing).empty())
                return std::string("uncertified packing");
            if (pc.cover) {
                if (static_cast<int>(pc.cover->size()) > 2 * r - 2) return std::string("cover too large");
                LabeledGraph rest = g.without_edges(*pc.cover);
                if (!enumerate_qualifying_circuits(rest, 0, sub).empty()) return std::string("cover misses a circuit");
            }
        }
        return std::string();
    }));

    out.push_back(check("decomposition-closed-loop", [&rng] {
        auto z2 = make_cyclic(2);
        for (int i = 0; i < 5; ++i) {
            LabeledGraph g = random_bridgeless(rng, z2, 6, 6);
            DecomposeOptions opts;
            opts.override_t = 3;
            try {
                DecomposeResult d = structure_decompose(g, opts);
                if (d.rich) continue;
                if (!verify_structure(g, d.shift, d.tree, d.t, d.outcome_bound).ok)
                    return std::string("decomposition failed verification");
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Precondition) throw;
            }
        }
        return std::string();
    }));

    out.push_back(check("theorem-t", [] {
        auto t = theorem_t(2, 1, 1);
        return t && *t == 512 ? std::string() : std::string("t for Z2, k = n = 1 is not 512");
    }));
    return out;
}

}  // namespace gammaforge
