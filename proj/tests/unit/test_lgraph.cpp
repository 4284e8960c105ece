#include <gtest/gtest.h>

#include <random>

#include "build.hpp"
#include "gammaforge/error.hpp"
#include "gammaforge/lgraph.hpp"
#include "oracles.hpp"

using namespace gammaforge;
using gftest::graph_of;
using gftest::trail_of;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Internal;
}

}  // namespace

TEST(LGraph, ConstructorValidates) {
    auto z2 = make_cyclic(2);
    EXPECT_THROW(graph_of(z2, 2, {{0, 2, 0}}), Error);
    EXPECT_THROW(graph_of(z2, 2, {{0, 1, 2}}), Error);
    std::vector<Edge> dup{{0, 0, 1, 0}, {0, 1, 0, 0}};
    EXPECT_THROW(LabeledGraph(z2, {"a", "b"}, dup), Error);
}

TEST(LGraph, ShiftSpecCases) {
    auto s3 = make_symmetric(3);
    auto g = graph_of(s3, 2, {{0, 1, 1}, {1, 0, 2}, {0, 0, 3}, {1, 1, 4}});
    EXPECT_EQ(shift(g, 0, 0), g);
    const Element a = 5;
    auto h = shift(g, 0, a);
    EXPECT_EQ(h.edge(0).label, s3->mul(a, 1));
    EXPECT_EQ(h.edge(1).label, s3->mul(2, s3->inv(a)));
    EXPECT_EQ(h.edge(2).label, s3->conj(a, 3));
    EXPECT_EQ(h.edge(3).label, 4);
    EXPECT_THROW(shift(g, 2, 1), Error);
}

TEST(LGraph, ShiftRoundTripAndInverseLabels) {
    std::mt19937_64 rng(7);
    for (auto grp : {make_cyclic(5), make_symmetric(3), make_cyclic(8)}) {
        for (int rep = 0; rep < 20; ++rep) {
            auto g = gftest::random_graph(rng, grp, 4, 7);
            std::uniform_int_distribution<int> el(0, grp->order() - 1);
            ShiftAssignment s(4), inv(4);
            for (int v = 0; v < 4; ++v) {
                s[v] = el(rng);
                inv[v] = grp->inv(s[v]);
            }
            EXPECT_EQ(apply_shift(apply_shift(g, s), inv), g);
            EXPECT_EQ(compose_shifts(*grp, inv, s), identity_shift(g));
            auto found = shifting_equivalent(g, apply_shift(g, s));
            ASSERT_TRUE(found.has_value());
            EXPECT_EQ(apply_shift(g, *found), apply_shift(g, s));
            for (const Edge& e : g.edges())
                EXPECT_EQ(g.label({e.id, false}), grp->inv(g.label({e.id, true})));
        }
    }
}

TEST(LGraph, TrailLabels) {
    auto s3 = make_symmetric(3);
    auto g = graph_of(s3, 3, {{0, 1, 1}, {1, 2, 3}});
    EXPECT_EQ(trail_label(g, trail_of({{0, true}})), 1);
    Trail t = trail_of({{0, true}, {1, true}});
    EXPECT_EQ(trail_label(g, t), s3->mul(1, 3));
    EXPECT_EQ(trail_label(g, inverse(t)), s3->inv(s3->mul(1, 3)));
    EXPECT_EQ(inverse(trail_of({{0, true}})), trail_of({{0, false}}));
    EXPECT_THROW(validate_trail(g, trail_of({{0, true}, {0, false}})), Error);
    EXPECT_THROW(validate_trail(g, trail_of({{1, true}, {0, true}})), Error);
    EXPECT_THROW(trail_label(g, trail_of({{1, true}, {0, true}})), Error);
    ShiftAssignment sig{2, 0, 4};
    EXPECT_EQ(shifted_trail_label(g, t, sig), trail_label(apply_shift(g, sig), t));
}

TEST(LGraph, InverseTrailLabelIsInverse) {
    std::mt19937_64 rng(11);
    auto s3 = make_symmetric(3);
    for (int rep = 0; rep < 50; ++rep) {
        auto g = gftest::random_graph(rng, s3, 4, 6);
        for (const auto& c : gftest::qualifying_circuits(g, 0, {0})) {
            Trail t;
            for (auto [e, f] : c) t.steps.push_back({e, f});
            EXPECT_EQ(trail_label(g, inverse(t)), s3->inv(trail_label(g, t)));
        }
    }
}

TEST(LGraph, Transitions) {
    auto z2 = make_cyclic(2);
    auto g = graph_of(z2, 4, {{0, 1, 0}, {1, 2, 0}, {2, 3, 1}});
    EXPECT_TRUE(transitions(trail_of({{0, true}})).empty());
    auto tr = transitions(trail_of({{0, true}, {1, true}, {2, true}}));
    EXPECT_EQ(tr.size(), 2u);
    // Canonical form is orientation independent.
    EXPECT_EQ(canonical_transition({0, true}, {1, true}), canonical_transition({1, false}, {0, false}));
}

TEST(LGraph, CyclicReorder) {
    auto s3 = make_symmetric(3);
    auto g = graph_of(s3, 2, {{0, 1, 1}, {1, 0, 3}});
    Trail c = trail_of({{0, true}, {1, true}});
    EXPECT_EQ(cyclic_reorder(g, c, 0), c);
    Trail r = cyclic_reorder(g, c, 1);
    EXPECT_EQ(r, trail_of({{1, true}, {0, true}}));
    Element ab = trail_label(g, c), ba = trail_label(g, r);
    EXPECT_EQ(ab, s3->mul(1, 3));
    EXPECT_EQ(ba, s3->mul(3, 1));
    bool conj = false;
    for (Element x = 0; x < 6; ++x) conj = conj || s3->conj(x, ab) == ba;
    EXPECT_TRUE(conj);
    auto z5 = make_cyclic(5);
    auto h = graph_of(z5, 3, {{0, 1, 1}, {1, 2, 2}, {2, 0, 4}});
    Trail hc = trail_of({{0, true}, {1, true}, {2, true}});
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(trail_label(h, cyclic_reorder(h, hc, i)), 2);
    EXPECT_THROW(cyclic_reorder(g, trail_of({{0, true}}), 0), Error);
}

TEST(LGraph, SplitOff) {
    auto s3 = make_symmetric(3);
    auto g = graph_of(s3, 3, {{0, 1, 2}, {1, 2, 4}, {2, 0, 0}});
    auto r = split_off(g, {0, true}, {1, true});
    EXPECT_EQ(r.graph.edge_count(), 2);
    const Edge& ne = r.graph.edge(r.new_edge);
    Vertex t = ne.tail;
    Element l = t == 0 ? ne.label : s3->inv(ne.label);
    EXPECT_EQ(l, s3->mul(2, 4));
    auto r2 = split_off(g, {1, false}, {0, false});
    EXPECT_EQ(r.graph, r2.graph);
    auto id = graph_of(s3, 3, {{0, 1, 0}, {1, 2, 0}});
    EXPECT_EQ(split_off(id, {0, true}, {1, true}).graph.edges().back().label, 0);
    EXPECT_EQ(code_of([&] { split_off(g, {0, true}, {2, true}); }), ErrorCode::InvalidTransition);
}

TEST(LGraph, ShiftingEquivalent) {
    auto s3 = make_symmetric(3);
    auto g = graph_of(s3, 3, {{0, 1, 2}, {1, 2, 4}, {2, 2, 1}});
    auto same = shifting_equivalent(g, g);
    ASSERT_TRUE(same);
    EXPECT_EQ(apply_shift(g, *same), g);
    auto moved = shift(g, 1, 3);
    auto sig = shifting_equivalent(g, moved);
    ASSERT_TRUE(sig);
    EXPECT_EQ(apply_shift(g, *sig), moved);
    // Loops labeled by non-conjugate elements: identity vs a transposition.
    auto a = graph_of(s3, 1, {{0, 0, 0}});
    auto b = graph_of(s3, 1, {{0, 0, 1}});
    EXPECT_FALSE(shifting_equivalent(a, b));
    auto other = graph_of(s3, 3, {{0, 2, 2}, {1, 2, 4}, {2, 2, 1}});
    EXPECT_THROW(shifting_equivalent(g, other), Error);
}

TEST(LGraph, InnerAndBoundary) {
    auto z2 = make_cyclic(2);
    auto g = graph_of(z2, 4, {{0, 1, 0}, {1, 2, 1}, {2, 3, 0}, {1, 1, 1}});
    EXPECT_EQ(inner_edges(g, {0, 1}), (std::vector<int>{0, 3}));
    EXPECT_EQ(boundary_edges(g, {0, 1}), std::vector<int>{1});
}
