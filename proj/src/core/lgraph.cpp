#include "gammaforge/lgraph.hpp"

#include <algorithm>
#include <deque>

#include "gammaforge/error.hpp"

namespace gammaforge {

std::vector<std::vector<int>> Multigraph::incidence() const {
    std::vector<std::vector<int>> inc(vertex_count);
    for (int e = 0; e < edge_count(); ++e) {
        inc[edges[e].first].push_back(e);
        if (edges[e].second != edges[e].first) inc[edges[e].second].push_back(e);
    }
    return inc;
}

VertexSet normalized(VertexSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

std::vector<char> membership(const VertexSet& s, int vertex_count) {
    std::vector<char> in(vertex_count, 0);
    for (Vertex v : s) in.at(v) = 1;
    return in;
}

Transition canonical_transition(OrientedEdge a, OrientedEdge b) {
    Transition t1{a, b};
    Transition t2{b.reversed(), a.reversed()};
    return std::min(t1, t2);
}

LabeledGraph::LabeledGraph(GroupPtr group, std::vector<std::string> vertex_names,
                           std::vector<Edge> edges)
    : group_(std::move(group)), names_(std::move(vertex_names)), edges_(std::move(edges)) {
    require(group_ != nullptr, ErrorCode::InvalidParameter, "labeled graph needs a group");
    int max_id = -1;
    for (const Edge& e : edges_) {
        require(e.id >= 0, ErrorCode::InvalidParameter, "negative edge id");
        require(has_vertex(e.tail) && has_vertex(e.head), ErrorCode::InvalidParameter,
                "edge " + std::to_string(e.id) + " has an endpoint outside the vertex set");
        require(group_->contains(e.label), ErrorCode::InvalidParameter,
                "edge " + std::to_string(e.id) + " has a label outside the group");
        max_id = std::max(max_id, e.id);
    }
    pos_.assign(max_id + 1, -1);
    for (int i = 0; i < edge_count(); ++i) {
        require(pos_[edges_[i].id] < 0, ErrorCode::InvalidParameter,
                "duplicate edge id " + std::to_string(edges_[i].id));
        pos_[edges_[i].id] = i;
    }
}

LabeledGraph LabeledGraph::with_vertices(GroupPtr group, int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return LabeledGraph(std::move(group), std::move(names), {});
}

std::optional<Vertex> LabeledGraph::find_vertex(std::string_view name) const {
    for (int v = 0; v < vertex_count(); ++v)
        if (names_[v] == name) return v;
    return std::nullopt;
}

const Edge& LabeledGraph::edge(int id) const {
    int p = position(id);
    require(p >= 0, ErrorCode::InvalidParameter, "unknown edge id " + std::to_string(id));
    return edges_[p];
}

Vertex LabeledGraph::tail(OrientedEdge e) const {
    const Edge& ed = edge(e.edge);
    return e.forward ? ed.tail : ed.head;
}

Vertex LabeledGraph::head(OrientedEdge e) const {
    const Edge& ed = edge(e.edge);
    return e.forward ? ed.head : ed.tail;
}

Element LabeledGraph::label(OrientedEdge e) const {
    const Edge& ed = edge(e.edge);
    return e.forward ? ed.label : group_->inv(ed.label);
}

LabeledGraph LabeledGraph::shifted(const ShiftAssignment& sigma) const {
    require(static_cast<int>(sigma.size()) == vertex_count(), ErrorCode::InvalidParameter,
            "shift assignment size does not match vertex count");
    LabeledGraph out = *this;
    for (Edge& e : out.edges_) {
        require(group_->contains(sigma[e.tail]) && group_->contains(sigma[e.head]),
                ErrorCode::InvalidParameter, "shift value outside the group");
        e.label = group_->mul(group_->mul(sigma[e.tail], e.label), group_->inv(sigma[e.head]));
    }
    return out;
}

LabeledGraph LabeledGraph::without_edges(std::span<const int> ids) const {
    std::vector<char> drop(pos_.size(), 0);
    for (int id : ids)
        if (id >= 0 && id < static_cast<int>(drop.size())) drop[id] = 1;
    std::vector<Edge> kept;
    for (const Edge& e : edges_)
        if (!drop[e.id]) kept.push_back(e);
    LabeledGraph out(group_, names_, std::move(kept));
    // Keep id allocation monotone even if the highest ids were dropped.
    if (out.pos_.size() < pos_.size()) out.pos_.resize(pos_.size(), -1);
    return out;
}

LabeledGraph LabeledGraph::with_edge(Vertex tail, Vertex head, Element label) const {
    std::vector<Edge> es = edges_;
    es.push_back({next_edge_id(), tail, head, label});
    return LabeledGraph(group_, names_, std::move(es));
}

Multigraph LabeledGraph::underlying() const {
    Multigraph m;
    m.vertex_count = vertex_count();
    for (const Edge& e : edges_) m.add_edge(e.tail, e.head);
    return m;
}

bool LabeledGraph::operator==(const LabeledGraph& other) const {
    if (!group_ || !other.group_) return group_ == other.group_;
    return *group_ == *other.group_ && names_ == other.names_ && edges_ == other.edges_;
}

ShiftAssignment identity_shift(const LabeledGraph& g) {
    return ShiftAssignment(g.vertex_count(), g.G().identity());
}

LabeledGraph shift(const LabeledGraph& g, Vertex v, Element alpha) {
    require(g.has_vertex(v), ErrorCode::InvalidParameter, "shift at unknown vertex");
    require(g.G().contains(alpha), ErrorCode::InvalidParameter, "shift by element outside group");
    ShiftAssignment sigma = identity_shift(g);
    sigma[v] = alpha;
    return g.shifted(sigma);
}

ShiftAssignment compose_shifts(const FiniteGroup& grp, const ShiftAssignment& sigma2,
                               const ShiftAssignment& sigma1) {
    require(sigma1.size() == sigma2.size(), ErrorCode::InvalidParameter,
            "shift assignments differ in size");
    ShiftAssignment out(sigma1.size());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = grp.mul(sigma2[v], sigma1[v]);
    return out;
}

std::string trail_problem(const LabeledGraph& g, const Trail& t) {
    if (t.empty()) return "trail is empty";
    std::vector<int> ids;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!g.has_edge(t.steps[i].edge))
            return "step " + std::to_string(i) + " uses unknown edge " +
                   std::to_string(t.steps[i].edge);
        ids.push_back(t.steps[i].edge);
        if (i > 0 && g.head(t.steps[i - 1]) != g.tail(t.steps[i]))
            return "step " + std::to_string(i) + " does not continue from the previous head";
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) return "trail repeats an edge";
    return {};
}

void validate_trail(const LabeledGraph& g, const Trail& t) {
    std::string p = trail_problem(g, t);
    require(p.empty(), ErrorCode::InvalidParameter, "invalid trail: " + p);
}

Vertex trail_tail(const LabeledGraph& g, const Trail& t) { return g.tail(t.steps.front()); }
Vertex trail_head(const LabeledGraph& g, const Trail& t) { return g.head(t.steps.back()); }

bool is_circuit(const LabeledGraph& g, const Trail& t) {
    return trail_problem(g, t).empty() && trail_tail(g, t) == trail_head(g, t);
}

Element trail_label(const LabeledGraph& g, const Trail& t) {
    validate_trail(g, t);
    Element acc = g.G().identity();
    for (OrientedEdge s : t.steps) acc = g.G().mul(acc, g.label(s));
    return acc;
}

Element shifted_trail_label(const LabeledGraph& g, const Trail& t, const ShiftAssignment& sigma) {
    const FiniteGroup& G = g.G();
    Element inner = trail_label(g, t);
    return G.mul(G.mul(sigma.at(trail_tail(g, t)), inner), G.inv(sigma.at(trail_head(g, t))));
}

Trail inverse(const Trail& t) {
    Trail r;
    r.steps.reserve(t.size());
    for (auto it = t.steps.rbegin(); it != t.steps.rend(); ++it) r.steps.push_back(it->reversed());
    return r;
}

Trail concat(const Trail& a, const Trail& b) {
    Trail r = a;
    r.steps.insert(r.steps.end(), b.steps.begin(), b.steps.end());
    return r;
}

std::vector<Transition> transitions(const Trail& t) {
    std::vector<Transition> out;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        out.push_back(canonical_transition(t.steps[i], t.steps[i + 1]));
    std::sort(out.begin(), out.end());
    return out;
}

Trail cyclic_reorder(const LabeledGraph& g, const Trail& c, std::size_t i) {
    require(is_circuit(g, c), ErrorCode::InvalidParameter, "cyclic reorder needs a circuit");
    require(i < c.size(), ErrorCode::InvalidParameter, "reorder index out of range");
    Trail r;
    r.steps.insert(r.steps.end(), c.steps.begin() + static_cast<std::ptrdiff_t>(i), c.steps.end());
    r.steps.insert(r.steps.end(), c.steps.begin(), c.steps.begin() + static_cast<std::ptrdiff_t>(i));
    return r;
}

SplitOffResult split_off(const LabeledGraph& g, OrientedEdge a, OrientedEdge b) {
    require(g.has_edge(a.edge) && g.has_edge(b.edge), ErrorCode::InvalidParameter,
            "split-off of unknown edge");
    require(a.edge != b.edge, ErrorCode::InvalidTransition,
            "split-off needs two distinct underlying edges");
    require(g.head(a) == g.tail(b), ErrorCode::InvalidTransition,
            "split-off needs head(a) == tail(b)");
    const FiniteGroup& G = g.G();
    Vertex u = g.tail(a);
    Vertex w = g.head(b);
    Element lbl = G.mul(g.label(a), g.label(b));
    if (u > w) {
        std::swap(u, w);
        lbl = G.inv(lbl);
    } else if (u == w) {
        lbl = std::min(lbl, G.inv(lbl));
    }
    const int ids[] = {a.edge, b.edge};
    LabeledGraph rest = g.without_edges(ids);
    int fresh = rest.next_edge_id();
    return {rest.with_edge(u, w, lbl), fresh};
}

std::optional<ShiftAssignment> shifting_equivalent(const LabeledGraph& g1, const LabeledGraph& g2) {
    require(g1.G() == g2.G(), ErrorCode::InvalidParameter, "graphs over different groups");
    require(g1.vertex_count() == g2.vertex_count() && g1.edge_count() == g2.edge_count(),
            ErrorCode::InvalidParameter, "graphs have different underlying graphs");
    for (int i = 0; i < g1.edge_count(); ++i) {
        const Edge& a = g1.edges()[i];
        const Edge& b = g2.edges()[i];
        require(a.id == b.id && a.tail == b.tail && a.head == b.head, ErrorCode::InvalidParameter,
                "graphs have different underlying graphs");
    }
    const FiniteGroup& G = g1.G();
    const int n = g1.vertex_count();
    Multigraph m = g1.underlying();
    auto inc = m.incidence();

    ShiftAssignment sigma(n, -1);
    std::vector<char> done(n, 0);
    for (Vertex root = 0; root < n; ++root) {
        if (done[root]) continue;
        // Collect the component, then try every root value; propagation fixes the rest.
        std::vector<Vertex> comp{root};
        done[root] = 1;
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (int e : inc[comp[i]]) {
                Vertex w = m.other(e, comp[i]);
                if (!done[w]) {
                    done[w] = 1;
                    comp.push_back(w);
                }
            }
        bool found = false;
        for (Element r = 0; r < G.order() && !found; ++r) {
            // Try the identity first so equal labelings give the identity assignment.
            Element rv = r == 0 ? G.identity() : (r == G.identity() ? 0 : r);
            for (Vertex v : comp) sigma[v] = -1;
            sigma[root] = rv;
            std::deque<Vertex> queue{root};
            bool ok = true;
            while (!queue.empty() && ok) {
                Vertex v = queue.front();
                queue.pop_front();
                for (int e : inc[v]) {
                    const Edge& a = g1.edges()[e];
                    const Edge& b = g2.edges()[e];
                    if (a.tail == v && sigma[a.head] < 0) {
                        // sigma(t) l1 sigma(h)^-1 = l2  =>  sigma(h) = l2^-1 sigma(t) l1
                        sigma[a.head] = G.mul(G.mul(G.inv(b.label), sigma[v]), a.label);
                        queue.push_back(a.head);
                    } else if (a.head == v && sigma[a.tail] < 0) {
                        sigma[a.tail] = G.mul(G.mul(b.label, sigma[v]), G.inv(a.label));
                        queue.push_back(a.tail);
                    }
                }
            }
            for (Vertex v : comp) {
                for (int e : inc[v]) {
                    const Edge& a = g1.edges()[e];
                    const Edge& b = g2.edges()[e];
                    if (G.mul(G.mul(sigma[a.tail], a.label), G.inv(sigma[a.head])) != b.label) ok = false;
                }
            }
            found = ok;
        }
        if (!found) return std::nullopt;
    }
    return sigma;
}

std::vector<int> inner_edges(const LabeledGraph& g, const VertexSet& b) {
    auto in = membership(b, g.vertex_count());
    std::vector<int> out;
    for (const Edge& e : g.edges())
        if (in[e.tail] && in[e.head]) out.push_back(e.id);
    return out;
}

std::vector<int> boundary_edges(const LabeledGraph& g, const VertexSet& b) {
    auto in = membership(b, g.vertex_count());
    std::vector<int> out;
    for (const Edge& e : g.edges())
        if (in[e.tail] != in[e.head]) out.push_back(e.id);
    return out;
}

}  // namespace gammaforge
