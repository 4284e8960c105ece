#include <gtest/gtest.h>

#include <random>

#include "build.hpp"
#include "gammaforge/error.hpp"
#include "gammaforge/io.hpp"
#include "oracles.hpp"

using namespace gammaforge;
using gftest::graph_of;

namespace {

ErrorCode parse_code(std::string_view text) {
    try {
        io::parse_graph(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

}  // namespace

TEST(Io, GroupRoundTrip) {
    for (auto g : {make_cyclic(1), make_cyclic(6), make_symmetric(3)}) {
        auto back = io::parse_group(io::group_to_json(*g));
        EXPECT_EQ(*back, *g);
    }
    EXPECT_EQ(io::parse_group("z4")->order(), 4);
    EXPECT_EQ(io::parse_group("S3")->order(), 6);
    EXPECT_EQ(io::parse_group("trivial")->order(), 1);
    auto custom = io::parse_group(R"({"order": 2, "table": [[0, 1], [1, 0]], "name": "flip"})");
    EXPECT_EQ(custom->name(), "flip");
    EXPECT_THROW(io::parse_group("q8"), Error);
    EXPECT_THROW(io::parse_group(R"({"order": 2, "table": [[0, 1], [1, 1]]})"), Error);
}

TEST(Io, GraphRoundTripAndDeterminism) {
    std::mt19937_64 rng(53);
    for (auto grp : {make_cyclic(3), make_symmetric(3)}) {
        for (int rep = 0; rep < 20; ++rep) {
            auto g = gftest::random_graph(rng, grp, 4, 6);
            std::string text = io::graph_to_json(g);
            auto back = io::parse_graph(text);
            EXPECT_EQ(back, g);
            EXPECT_EQ(io::graph_to_json(back), text);
        }
    }
}

TEST(Io, MalformedGraphs) {
    EXPECT_EQ(parse_code("{"), ErrorCode::Parse);
    EXPECT_EQ(parse_code(R"({"group": "z2", "vertices": ["a"]})"), ErrorCode::Parse);
    EXPECT_EQ(parse_code(R"({"group": "z2", "vertices": ["a", "a"], "edges": []})"), ErrorCode::Parse);
    EXPECT_EQ(parse_code(R"({"group": "z2", "vertices": ["a"], "edges": [{"id": 0, "tail": "a", "head": "b", "label": 0}]})"),
              ErrorCode::Parse);
    try {
        io::parse_graph(R"({"group": "z2", "vertices": ["a"], "edges": [{"id": 0, "tail": "a", "head": "a", "label": "x"}]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("edges[0]"), std::string::npos) << e.what();
    }
}

TEST(Io, Lists) {
    auto z4 = make_cyclic(4);
    auto g = graph_of(z4, 3, {});
    EXPECT_EQ(io::parse_vertex_list(g, "2,0"), (VertexSet{0, 2}));
    EXPECT_THROW(io::parse_vertex_list(g, "7"), Error);
    EXPECT_EQ(io::parse_element_list(*z4, ""), std::vector<Element>{});
    EXPECT_EQ(io::parse_element_list(*z4, "1,3"), (std::vector<Element>{1, 3}));
    EXPECT_THROW(io::parse_element_list(*z4, "4"), Error);
}

TEST(Io, ImmersionRoundTrip) {
    auto z3 = make_cyclic(3);
    auto host = graph_of(z3, 3, {{0, 1, 1}, {1, 2, 1}, {2, 0, 2}});
    auto pat = graph_of(z3, 2, {{0, 1, 2}});
    auto r = find_immersion(host, pat);
    ASSERT_EQ(r.status, SearchStatus::Found);
    std::string text = io::immersion_to_json(host, pat, *r.immersion);
    Immersion back = io::parse_immersion(host, pat, text);
    EXPECT_EQ(back.vertex_map, r.immersion->vertex_map);
    EXPECT_EQ(back.trails, r.immersion->trails);
    EXPECT_EQ(back.shift, r.immersion->shift);
}

TEST(Io, DecompositionRoundTrip) {
    std::mt19937_64 rng(59);
    auto z2 = make_cyclic(2);
    auto raw = gftest::random_bridgeless(rng, z2, 7, 8);
    std::vector<Edge> es = raw.edges();
    for (Edge& e : es) e.label = 0;
    LabeledGraph g(z2, raw.vertex_names(), es);
    DecomposeOptions o;
    o.override_t = 3;
    auto d = structure_decompose(g, o);
    std::string text = io::decomposition_to_json(g, d);
    auto p = io::parse_decomposition(g, text);
    EXPECT_EQ(p.shift, d.shift);
    EXPECT_EQ(p.tree, d.tree);
    EXPECT_EQ(p.t, 3);
    EXPECT_EQ(p.outcome_bound, d.outcome_bound);
    EXPECT_EQ(io::decomposition_to_json(g, structure_decompose(g, o)), text);
}
