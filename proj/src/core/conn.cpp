#include "gammaforge/conn.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "gammaforge/error.hpp"

namespace gammaforge {

namespace {

constexpr int kInf = INT_MAX / 4;

bool usable_at(std::span<const char> usable, int e) { return usable.empty() || usable[e] != 0; }

}  // namespace

FlowNetwork::FlowNetwork(int nodes) : adj_(nodes), level_(nodes), next_(nodes) {}

void FlowNetwork::reset(int nodes) {
    arcs_.clear();
    adj_.resize(nodes);
    for (auto& out : adj_) out.clear();
    level_.resize(nodes);
    next_.resize(nodes);
}

int FlowNetwork::add_arc(int from, int to, int capacity) {
    int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, capacity, 0, id + 1});
    arcs_.push_back({from, 0, 0, id});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
}

int FlowNetwork::add_undirected(int u, int v, int capacity) {
    int id = static_cast<int>(arcs_.size());
    arcs_.push_back({v, capacity, 0, id + 1});
    arcs_.push_back({u, capacity, 0, id});
    adj_[u].push_back(id);
    adj_[v].push_back(id + 1);
    return id;
}

bool FlowNetwork::bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    level_[s] = 0;
    queue_.assign(1, s);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        int v = queue_[head];
        for (int a : adj_[v]) {
            const Arc& arc = arcs_[a];
            if (arc.capacity - arc.flow > 0 && level_[arc.to] < 0) {
                level_[arc.to] = level_[v] + 1;
                queue_.push_back(arc.to);
            }
        }
    }
    return level_[t] >= 0;
}

int FlowNetwork::dfs(int v, int t, int pushed) {
    if (v == t || pushed == 0) return pushed;
    for (int& i = next_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
        int a = adj_[v][i];
        Arc& arc = arcs_[a];
        if (level_[arc.to] != level_[v] + 1 || arc.capacity - arc.flow <= 0) continue;
        int got = dfs(arc.to, t, std::min(pushed, arc.capacity - arc.flow));
        if (got > 0) {
            arc.flow += got;
            arcs_[arc.rev].flow -= got;
            return got;
        }
    }
    return 0;
}

int FlowNetwork::max_flow(int s, int t, int limit) {
    if (s == t) return 0;
    int total = 0;
    while (total < limit && bfs(s, t)) {
        std::fill(next_.begin(), next_.end(), 0);
        while (total < limit) {
            int got = dfs(s, t, limit - total);
            if (got == 0) break;
            total += got;
        }
    }
    return total;
}

std::vector<char> FlowNetwork::residual_reachable(int s) const {
    std::vector<char> seen(adj_.size(), 0);
    seen[s] = 1;
    std::deque<int> q{s};
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int a : adj_[v]) {
            const Arc& arc = arcs_[a];
            if (arc.capacity - arc.flow > 0 && !seen[arc.to]) {
                seen[arc.to] = 1;
                q.push_back(arc.to);
            }
        }
    }
    return seen;
}

Vertex walk_tail(const Multigraph& g, const Walk& w) {
    const auto& e = g.edges[w.front().edge];
    return w.front().forward ? e.first : e.second;
}

Vertex walk_head(const Multigraph& g, const Walk& w) {
    const auto& e = g.edges[w.back().edge];
    return w.back().forward ? e.second : e.first;
}

Trail to_trail(const LabeledGraph& g, const Walk& w) {
    Trail t;
    for (OrientedEdge s : w) t.steps.push_back({g.edges().at(s.edge).id, s.forward});
    return t;
}

Walk to_walk(const LabeledGraph& g, const Trail& t) {
    Walk w;
    for (OrientedEdge s : t.steps) {
        int p = g.position(s.edge);
        require(p >= 0, ErrorCode::InvalidParameter, "trail uses unknown edge");
        w.push_back({p, s.forward});
    }
    return w;
}

int degree(const Multigraph& g, Vertex v) {
    int d = 0;
    for (const auto& [a, b] : g.edges)
        if (a != b && (a == v || b == v)) ++d;
    return d;
}

int edge_connectivity(const Multigraph& g, Vertex u, Vertex v, int limit) {
    require(u != v, ErrorCode::InvalidParameter, "edge connectivity needs two distinct vertices");
    require(u >= 0 && u < g.vertex_count && v >= 0 && v < g.vertex_count,
            ErrorCode::InvalidParameter, "vertex out of range");
    FlowNetwork net(g.vertex_count);
    for (const auto& [a, b] : g.edges)
        if (a != b) net.add_undirected(a, b, 1);
    return net.max_flow(u, v, limit);
}

MinCut min_cut(const Multigraph& g, const VertexSet& sources, const VertexSet& sinks,
               std::span<const char> usable) {
    const int n = g.vertex_count;
    auto in_src = membership(sources, n);
    for (Vertex v : sinks)
        require(!in_src[v], ErrorCode::InvalidParameter, "source and sink sets overlap");
    FlowNetwork net(n + 2);
    const int s = n, t = n + 1;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& [a, b] = g.edges[e];
        if (a != b && usable_at(usable, e)) net.add_undirected(a, b, 1);
    }
    for (Vertex v : sources) net.add_arc(s, v, kInf);
    for (Vertex v : sinks) net.add_arc(v, t, kInf);
    MinCut out;
    out.value = net.max_flow(s, t);
    auto reach = net.residual_reachable(s);
    for (Vertex v = 0; v < n; ++v)
        if (reach[v]) out.source_side.push_back(v);
    return out;
}

RoutedWalks route_trails(const Multigraph& g, std::span<const std::pair<Vertex, int>> supply,
                         std::span<const std::pair<Vertex, int>> demand, int limit,
                         std::span<const char> usable) {
    const int n = g.vertex_count;
    FlowNetwork net(n + 2);
    const int s = n, t = n + 1;
    std::vector<int> arc_edge;
    auto note = [&](int arc, int edge) {
        if (static_cast<int>(arc_edge.size()) < arc + 2) arc_edge.resize(arc + 2, -1);
        arc_edge[arc] = edge;
        arc_edge[arc + 1] = edge;
    };
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& [a, b] = g.edges[e];
        if (a != b && usable_at(usable, e)) note(net.add_undirected(a, b, 1), e);
    }
    for (const auto& [v, c] : supply) note(net.add_arc(s, v, c), -1);
    for (const auto& [v, c] : demand) note(net.add_arc(v, t, c), -1);

    RoutedWalks out;
    out.value = net.max_flow(s, t, limit);

    // Peel unit walks off the flow. Each step consumes one unit on an arc, so
    // walks are edge-disjoint and every walk ends at t by conservation.
    std::vector<int> residual_flow(arc_edge.size(), 0);
    for (std::size_t a = 0; a < arc_edge.size(); ++a) residual_flow[a] = net.flow(static_cast<int>(a));
    for (int unit = 0; unit < out.value; ++unit) {
        Walk w;
        int cur = s;
        Vertex start = -1, end = -1;
        while (cur != t) {
            int chosen = -1;
            for (int a : net.out_arcs(cur))
                if (residual_flow[a] > 0) {
                    chosen = a;
                    break;
                }
            require(chosen >= 0, ErrorCode::Internal, "flow decomposition got stuck");
            residual_flow[chosen] -= 1;
            residual_flow[net.arc(chosen).rev] += 1;
            int next = net.arc(chosen).to;
            int e = arc_edge[chosen];
            if (cur == s) start = next;
            if (next == t) end = cur;
            if (e >= 0) w.push_back({e, g.edges[e].first == cur});
            cur = next;
        }
        out.walks.push_back(std::move(w));
        out.starts.push_back(start);
        out.ends.push_back(end);
    }
    return out;
}

std::vector<VertexSet> components(const Multigraph& g, std::span<const char> usable) {
    auto inc = g.incidence();
    std::vector<char> seen(g.vertex_count, 0);
    std::vector<VertexSet> out;
    for (Vertex r = 0; r < g.vertex_count; ++r) {
        if (seen[r]) continue;
        VertexSet comp{r};
        seen[r] = 1;
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (int e : inc[comp[i]]) {
                if (!usable_at(usable, e)) continue;
                Vertex w = g.other(e, comp[i]);
                if (!seen[w]) {
                    seen[w] = 1;
                    comp.push_back(w);
                }
            }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

std::vector<int> bridges(const Multigraph& g, std::span<const char> usable) {
    auto inc = g.incidence();
    const int n = g.vertex_count;
    std::vector<int> disc(n, -1), low(n, 0);
    std::vector<int> out;
    int timer = 0;
    std::function<void(Vertex, int)> dfs = [&](Vertex v, int parent_edge) {
        disc[v] = low[v] = timer++;
        for (int e : inc[v]) {
            if (e == parent_edge || !usable_at(usable, e)) continue;
            Vertex w = g.other(e, v);
            if (w == v) continue;
            if (disc[w] < 0) {
                dfs(w, e);
                low[v] = std::min(low[v], low[w]);
                if (low[w] > disc[v]) out.push_back(e);
            } else {
                low[v] = std::min(low[v], disc[w]);
            }
        }
    };
    for (Vertex v = 0; v < n; ++v)
        if (disc[v] < 0) dfs(v, -1);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VertexSet> edge_blocks(const Multigraph& g, std::span<const char> usable) {
    std::vector<char> keep(g.edge_count(), 1);
    for (int e = 0; e < g.edge_count(); ++e) keep[e] = usable_at(usable, e) ? 1 : 0;
    for (int e : bridges(g, usable)) keep[e] = 0;
    return components(g, keep);
}

int block_of(const std::vector<VertexSet>& blocks, Vertex v) {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (std::binary_search(blocks[i].begin(), blocks[i].end(), v)) return static_cast<int>(i);
    return -1;
}

bool is_two_edge_connected(const Multigraph& g) {
    if (g.vertex_count <= 1) return true;
    return components(g).size() == 1 && bridges(g).empty();
}

std::optional<Walk> cycle_through(const Multigraph& g, Vertex x, std::span<const char> usable) {
    for (int e = 0; e < g.edge_count(); ++e)
        if (usable_at(usable, e) && g.edges[e].first == x && g.edges[e].second == x)
            return Walk{{e, true}};
    auto inc = g.incidence();
    for (int e : inc[x]) {
        if (!usable_at(usable, e)) continue;
        Vertex y = g.other(e, x);
        // Shortest y -> x path avoiding e.
        std::vector<int> via(g.vertex_count, -1);
        std::vector<char> seen(g.vertex_count, 0);
        seen[y] = 1;
        std::deque<Vertex> q{y};
        while (!q.empty() && !seen[x]) {
            Vertex v = q.front();
            q.pop_front();
            for (int f : inc[v]) {
                if (f == e || !usable_at(usable, f)) continue;
                Vertex w = g.other(f, v);
                if (seen[w]) continue;
                seen[w] = 1;
                via[w] = f;
                q.push_back(w);
            }
        }
        if (!seen[x]) continue;
        Walk back;
        for (Vertex v = x; v != y;) {
            int f = via[v];
            Vertex u = g.other(f, v);
            back.push_back({f, g.edges[f].first == u});
            v = u;
        }
        std::reverse(back.begin(), back.end());
        Walk cyc{{e, g.edges[e].first == x}};
        cyc.insert(cyc.end(), back.begin(), back.end());
        return cyc;
    }
    return std::nullopt;
}

namespace {

std::string walk_shape_problem(const Multigraph& g, const Walk& w) {
    if (w.empty()) return "empty ear";
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i].edge < 0 || w[i].edge >= g.edge_count()) return "ear uses unknown edge";
        if (i > 0 && walk_head(g, Walk{w[i - 1]}) != walk_tail(g, Walk{w[i]}))
            return "ear is not contiguous";
    }
    return {};
}

}  // namespace

std::string ear_decomposition_problem(const Multigraph& g, const EarDecomposition& d) {
    if (d.ears.empty()) return "no ears";
    std::vector<int> edge_uses(g.edge_count(), 0);
    std::vector<char> covered(g.vertex_count, 0);
    for (std::size_t k = 0; k < d.ears.size(); ++k) {
        const Walk& ear = d.ears[k];
        std::string p = walk_shape_problem(g, ear);
        if (!p.empty()) return "ear " + std::to_string(k) + ": " + p;
        for (OrientedEdge s : ear) edge_uses[s.edge]++;
        Vertex a = walk_tail(g, ear), b = walk_head(g, ear);
        std::vector<Vertex> internal;
        for (std::size_t i = 0; i + 1 < ear.size(); ++i) internal.push_back(walk_head(g, Walk{ear[i]}));
        if (k == 0) {
            if (a != b) return "first ear is not closed";
            // A cycle: vertices along it are distinct apart from the closing one.
            std::vector<Vertex> vs = internal;
            vs.push_back(a);
            std::sort(vs.begin(), vs.end());
            if (std::adjacent_find(vs.begin(), vs.end()) != vs.end()) return "first ear is not a cycle";
            for (Vertex v : vs) covered[v] = 1;
            continue;
        }
        if (!covered[a] || !covered[b])
            return "ear " + std::to_string(k) + " has an end outside earlier ears";
        std::vector<Vertex> sorted = internal;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            return "ear " + std::to_string(k) + " repeats an internal vertex";
        for (Vertex v : internal) {
            if (covered[v]) return "ear " + std::to_string(k) + " has an internal vertex in earlier ears";
        }
        for (Vertex v : internal) covered[v] = 1;
    }
    for (int e = 0; e < g.edge_count(); ++e)
        if (edge_uses[e] != 1)
            return "edge " + std::to_string(e) + " covered " + std::to_string(edge_uses[e]) + " times";
    return {};
}

EarDecomposition ear_decomposition(const Multigraph& g, const std::optional<Walk>& start) {
    require(g.edge_count() >= 1, ErrorCode::Precondition, "ear decomposition needs at least one edge");
    require(g.vertex_count >= 1 && is_two_edge_connected(g), ErrorCode::Precondition,
            "ear decomposition needs a 2-edge-connected graph");
    EarDecomposition d;
    if (start) {
        std::string p = walk_shape_problem(g, *start);
        require(p.empty(), ErrorCode::InvalidParameter, "start cycle: " + p);
        d.ears.push_back(*start);
    } else {
        auto c = cycle_through(g, 0);
        require(c.has_value(), ErrorCode::Precondition, "no cycle through vertex 0");
        d.ears.push_back(*c);
    }
    std::vector<char> used(g.edge_count(), 0), covered(g.vertex_count, 0);
    for (OrientedEdge s : d.ears[0]) {
        require(!used[s.edge], ErrorCode::InvalidParameter, "start cycle repeats an edge");
        used[s.edge] = 1;
        covered[g.edges[s.edge].first] = covered[g.edges[s.edge].second] = 1;
    }
    auto inc = g.incidence();
    for (;;) {
        int pick = -1;
        Vertex a = -1;
        for (int e = 0; e < g.edge_count() && pick < 0; ++e) {
            if (used[e]) continue;
            if (covered[g.edges[e].first]) pick = e, a = g.edges[e].first;
            else if (covered[g.edges[e].second]) pick = e, a = g.edges[e].second;
        }
        if (pick < 0) break;
        Vertex b = g.other(pick, a);
        Walk ear{{pick, g.edges[pick].first == a}};
        used[pick] = 1;
        if (!covered[b]) {
            // BFS through uncovered territory until the first covered vertex.
            std::vector<int> via(g.vertex_count, -1);
            std::vector<char> seen(g.vertex_count, 0);
            seen[b] = 1;
            std::deque<Vertex> q{b};
            Vertex hit = -1;
            while (!q.empty() && hit < 0) {
                Vertex v = q.front();
                q.pop_front();
                for (int f : inc[v]) {
                    if (used[f]) continue;
                    Vertex w = g.other(f, v);
                    if (seen[w]) continue;
                    seen[w] = 1;
                    via[w] = f;
                    if (covered[w]) {
                        hit = w;
                        break;
                    }
                    q.push_back(w);
                }
            }
            require(hit >= 0, ErrorCode::Internal, "ear search failed in a 2-edge-connected graph");
            Walk tail_part;
            for (Vertex v = hit; v != b;) {
                int f = via[v];
                Vertex u = g.other(f, v);
                tail_part.push_back({f, g.edges[f].first == u});
                v = u;
            }
            std::reverse(tail_part.begin(), tail_part.end());
            for (OrientedEdge s : tail_part) {
                used[s.edge] = 1;
                covered[g.edges[s.edge].first] = covered[g.edges[s.edge].second] = 1;
            }
            ear.insert(ear.end(), tail_part.begin(), tail_part.end());
        }
        d.ears.push_back(std::move(ear));
    }
    std::string problem = ear_decomposition_problem(g, d);
    require(problem.empty(), ErrorCode::InvalidParameter, "ear decomposition invalid: " + problem);
    return d;
}

CorePartition t_cores(const Multigraph& g, int t) {
    require(t >= 0, ErrorCode::InvalidParameter, "t must be nonnegative");
    CorePartition out;
    out.t = t;
    const int n = g.vertex_count;
    std::vector<int> deg(n, 0);
    for (const auto& [a, b] : g.edges)
        if (a != b) ++deg[a], ++deg[b];
    std::vector<int> cls(n, -1);
    for (Vertex v = 0; v < n; ++v) {
        if (deg[v] < t + 1 || cls[v] >= 0) continue;
        cls[v] = static_cast<int>(out.cores.size());
        VertexSet core{v};
        for (Vertex w = v + 1; w < n; ++w) {
            if (deg[w] < t + 1 || cls[w] >= 0) continue;
            if (edge_connectivity(g, v, w, t + 1) >= t + 1) {
                cls[w] = cls[v];
                core.push_back(w);
            }
        }
        out.cores.push_back(std::move(core));
    }
    return out;
}

int cut_size(const Multigraph& g, const VertexSet& s) {
    auto in = membership(s, g.vertex_count);
    int c = 0;
    for (const auto& [a, b] : g.edges)
        if (in[a] != in[b]) ++c;
    return c;
}

bool is_fully_connected(const Multigraph& g, Vertex v, const VertexSet& c) {
    auto in = membership(c, g.vertex_count);
    require(v >= 0 && v < g.vertex_count && in[v], ErrorCode::InvalidParameter,
            "vertex is not in the set");
    VertexSet outside;
    for (Vertex w = 0; w < g.vertex_count; ++w)
        if (!in[w]) outside.push_back(w);
    const int boundary = cut_size(g, c);
    if (outside.empty()) return true;
    return min_cut(g, VertexSet{v}, outside).value >= boundary;
}

Contraction contract(const Multigraph& g, const VertexSet& c) {
    auto in = membership(c, g.vertex_count);
    Contraction out;
    out.map.assign(g.vertex_count, -1);
    int next = 0;
    for (Vertex v = 0; v < g.vertex_count; ++v)
        if (!in[v]) out.map[v] = next++;
    out.merged = next;
    for (Vertex v = 0; v < g.vertex_count; ++v)
        if (in[v]) out.map[v] = next;
    out.graph.vertex_count = next + 1;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& [a, b] = g.edges[e];
        if (in[a] && in[b]) continue;
        out.graph.add_edge(out.map[a], out.map[b]);
        out.edge_origin.push_back(e);
    }
    return out;
}

InducedSubgraph induced(const Multigraph& g, const VertexSet& s, std::span<const char> usable) {
    InducedSubgraph out;
    std::vector<int> local(g.vertex_count, -1);
    for (Vertex v : s) {
        local[v] = static_cast<int>(out.to_parent.size());
        out.to_parent.push_back(v);
    }
    out.graph.vertex_count = static_cast<int>(s.size());
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& [a, b] = g.edges[e];
        if (local[a] < 0 || local[b] < 0 || !usable_at(usable, e)) continue;
        out.graph.add_edge(local[a], local[b]);
        out.edge_to_parent.push_back(e);
    }
    return out;
}

}  // namespace gammaforge
