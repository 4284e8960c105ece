#include "gammaforge/immerse.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_set>

#include "gammaforge/conn.hpp"
#include "gammaforge/error.hpp"

namespace gammaforge {

const char* to_string(ImmersionCondition c) noexcept {
    switch (c) {
    case ImmersionCondition::Ok: return "ok";
    case ImmersionCondition::Injectivity: return "injectivity";
    case ImmersionCondition::NotATrail: return "not-a-trail";
    case ImmersionCondition::InversePairing: return "inverse-pairing";
    case ImmersionCondition::EdgeDisjoint: return "edge-disjoint";
    case ImmersionCondition::Endpoints: return "endpoints";
    case ImmersionCondition::Label: return "label";
    }
    return "unknown";
}

const char* to_string(SearchStatus s) noexcept {
    switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::None: return "none";
    case SearchStatus::Unknown: return "unknown";
    }
    return "unknown";
}

const char* to_string(Tri t) noexcept {
    switch (t) {
    case Tri::True: return "true";
    case Tri::False: return "false";
    case Tri::Unknown: return "unknown";
    }
    return "unknown";
}

ImmersionReport verify_immersion(const LabeledGraph& host, const LabeledGraph& pattern,
                                 const Immersion& im, bool ignore_labels) {
    auto malformed = [](const std::string& what) { fail(ErrorCode::MalformedImmersion, what); };
    if (static_cast<int>(im.vertex_map.size()) != pattern.vertex_count())
        malformed("vertex map covers " + std::to_string(im.vertex_map.size()) + " of " +
                  std::to_string(pattern.vertex_count()) + " pattern vertices");
    if (static_cast<int>(im.trails.size()) != pattern.edge_count())
        malformed("trail map covers " + std::to_string(im.trails.size()) + " of " +
                  std::to_string(pattern.edge_count()) + " pattern edges");
    if (!ignore_labels && static_cast<int>(im.shift.size()) != host.vertex_count())
        malformed("shift assignment does not match host vertex count");
    for (Vertex v : im.vertex_map)
        if (!host.has_vertex(v)) malformed("vertex map points outside the host");
    if (!ignore_labels)
        for (Element a : im.shift)
            if (!host.G().contains(a)) malformed("shift value outside the group");
    for (const Trail& t : im.trails)
        for (OrientedEdge s : t.steps)
            if (!host.has_edge(s.edge)) malformed("branch trail uses unknown host edge " + std::to_string(s.edge));
    if (!ignore_labels && !(host.G() == pattern.G()))
        fail(ErrorCode::InvalidParameter, "host and pattern are labeled over different groups");

    std::vector<Vertex> images = im.vertex_map;
    std::sort(images.begin(), images.end());
    if (std::adjacent_find(images.begin(), images.end()) != images.end())
        return {ImmersionCondition::Injectivity, "two pattern vertices share a branch vertex"};

    for (int i = 0; i < pattern.edge_count(); ++i) {
        std::string p = trail_problem(host, im.trails[i]);
        if (!p.empty())
            return {ImmersionCondition::NotATrail,
                    "pattern edge " + std::to_string(pattern.edges()[i].id) + ": " + p};
    }
    // The reverse orientation is represented by inverse(trail), so pairing holds.
    for (int i = 0; i < pattern.edge_count(); ++i)
        if (inverse(inverse(im.trails[i])) != im.trails[i])
            return {ImmersionCondition::InversePairing, "trail inverse does not round-trip"};

    std::map<int, int> owner;
    for (int i = 0; i < pattern.edge_count(); ++i)
        for (OrientedEdge s : im.trails[i].steps) {
            auto [it, fresh] = owner.emplace(s.edge, i);
            if (!fresh)
                return {ImmersionCondition::EdgeDisjoint,
                        "host edge " + std::to_string(s.edge) + " is used by pattern edges " +
                            std::to_string(pattern.edges()[it->second].id) + " and " +
                            std::to_string(pattern.edges()[i].id)};
        }

    for (int i = 0; i < pattern.edge_count(); ++i) {
        const Edge& e = pattern.edges()[i];
        const Trail& t = im.trails[i];
        if (trail_tail(host, t) != im.vertex_map[e.tail] || trail_head(host, t) != im.vertex_map[e.head])
            return {ImmersionCondition::Endpoints,
                    "branch trail of pattern edge " + std::to_string(e.id) + " has the wrong ends"};
    }
    if (ignore_labels) return {};
    for (int i = 0; i < pattern.edge_count(); ++i) {
        const Edge& e = pattern.edges()[i];
        Element got = shifted_trail_label(host, im.trails[i], im.shift);
        if (got != e.label)
            return {ImmersionCondition::Label, "branch trail of pattern edge " + std::to_string(e.id) +
                                                   " has label " + std::to_string(got) + ", expected " +
                                                   std::to_string(e.label)};
    }
    return {};
}

Immersion identity_immersion(const LabeledGraph& g) {
    Immersion im;
    im.vertex_map.resize(g.vertex_count());
    std::iota(im.vertex_map.begin(), im.vertex_map.end(), 0);
    for (const Edge& e : g.edges()) im.trails.push_back(Trail{{{e.id, true}}});
    im.shift = identity_shift(g);
    return im;
}

Immersion compose(const LabeledGraph& g, const LabeledGraph& h, const Immersion& h_into_g,
                  const LabeledGraph& i, const Immersion& i_into_h) {
    require(static_cast<int>(i_into_h.vertex_map.size()) == i.vertex_count(),
            ErrorCode::MalformedImmersion, "inner immersion does not match its pattern");
    require(static_cast<int>(h_into_g.vertex_map.size()) == h.vertex_count(),
            ErrorCode::MalformedImmersion, "outer immersion does not match its pattern");
    Immersion out;
    for (Vertex w : i_into_h.vertex_map) out.vertex_map.push_back(h_into_g.vertex_map.at(w));
    for (const Trail& inner : i_into_h.trails) {
        Trail t;
        for (OrientedEdge s : inner.steps) {
            int p = h.position(s.edge);
            require(p >= 0, ErrorCode::MalformedImmersion, "inner trail uses unknown edge");
            Trail piece = h_into_g.trails.at(p);
            if (!s.forward) piece = inverse(piece);
            t = concat(t, piece);
        }
        out.trails.push_back(std::move(t));
    }
    out.shift = h_into_g.shift.empty() ? identity_shift(g) : h_into_g.shift;
    if (!i_into_h.shift.empty())
        for (Vertex w = 0; w < h.vertex_count(); ++w) {
            Vertex v = h_into_g.vertex_map[w];
            out.shift[v] = g.G().mul(i_into_h.shift.at(w), out.shift[v]);
        }
    out.audit = h_into_g.audit;
    out.audit.insert(out.audit.end(), i_into_h.audit.begin(), i_into_h.audit.end());
    return out;
}

namespace {

struct BudgetExhausted {};

// Pattern edge seen in a canonical orientation: tail <= head, and for loops
// the smaller of label and inverse. `flipped` records whether the stored
// orientation was reversed to get there.
struct CanonEdge {
    int pos;
    Vertex tail, head;
    Element label;
    bool flipped;
};

class ImmersionSearch {
public:
    ImmersionSearch(const LabeledGraph& host, const LabeledGraph& pattern, SearchBudget budget)
        : g_(host), h_(pattern), G_(host.G()), budget_(budget), mg_(host.underlying()) {
        inc_ = mg_.incidence();
        ends_.assign(g_.vertex_count(), 0);
        for (const Edge& e : g_.edges()) ends_[e.tail]++, ends_[e.head]++;
        hends_.assign(h_.vertex_count(), 0);
        for (const Edge& e : h_.edges()) hends_[e.tail]++, hends_[e.head]++;

        order_.resize(h_.vertex_count());
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(),
                         [&](Vertex a, Vertex b) { return hends_[a] > hends_[b]; });
        rank_.assign(h_.vertex_count(), 0);
        for (int i = 0; i < static_cast<int>(order_.size()); ++i) rank_[order_[i]] = i;

        edges_at_.resize(order_.size());
        for (int p = 0; p < h_.edge_count(); ++p) {
            const Edge& e = h_.edges()[p];
            CanonEdge c{p, e.tail, e.head, e.label, false};
            if (rank_[c.tail] > rank_[c.head] ||
                (c.tail == c.head && G_.inv(c.label) < c.label)) {
                std::swap(c.tail, c.head);
                c.label = G_.inv(c.label);
                c.flipped = true;
            }
            edges_at_[std::max(rank_[c.tail], rank_[c.head])].push_back(c);
        }
        for (auto& list : edges_at_)
            std::stable_sort(list.begin(), list.end(), [&](const CanonEdge& a, const CanonEdge& b) {
                auto key = [&](const CanonEdge& c) { return std::tuple(rank_[c.tail], rank_[c.head], c.label); };
                return key(a) < key(b);
            });
    }

    ImmersionSearchResult run() {
        ImmersionSearchResult res;
        res.status = SearchStatus::None;
        if (h_.vertex_count() > g_.vertex_count() || h_.edge_count() > g_.edge_count()) return res;
        try {
            for (limit_ = h_.edge_count(); limit_ <= std::max(g_.edge_count(), h_.edge_count()); ++limit_) {
                reset();
                failed_.clear();
                cutoff_ = false;
                local_cut_ = false;
                if (place(0)) {
                    res.status = SearchStatus::Found;
                    res.immersion = build();
                    break;
                }
                if (!cutoff_) break;
            }
        } catch (const BudgetExhausted&) {
            res.status = SearchStatus::Unknown;
        }
        res.nodes = nodes_;
        return res;
    }

private:
    void reset() {
        vmap_.assign(h_.vertex_count(), -1);
        taken_.assign(g_.vertex_count(), 0);
        sig_.assign(h_.vertex_count(), -1);
        used_.assign(g_.edge_count(), 0);
        walks_.assign(h_.edge_count(), {});
        total_ = 0;
        routed_ = 0;
    }

    void tick() {
        if (++nodes_ > budget_.max_nodes) throw BudgetExhausted{};
    }

    bool place(int idx) {
        if (idx == static_cast<int>(order_.size())) return true;
        Vertex a = order_[idx];
        for (Vertex v = 0; v < g_.vertex_count(); ++v) {
            if (taken_[v] || ends_[v] < hends_[a]) continue;
            tick();
            vmap_[a] = v;
            taken_[v] = 1;
            if (pairs_feasible(idx) && route(idx, 0)) return true;
            taken_[v] = 0;
            vmap_[a] = -1;
            sig_[a] = -1;
        }
        return false;
    }

    // Multiplicity of pattern edges between each newly closed vertex pair
    // cannot exceed the host's edge connectivity between their images.
    bool pairs_feasible(int idx) {
        std::map<std::pair<Vertex, Vertex>, int> mult;
        for (const CanonEdge& c : edges_at_[idx])
            if (c.tail != c.head) mult[{vmap_[c.tail], vmap_[c.head]}]++;
        for (const auto& [pr, m] : mult) {
            auto key = std::minmax(pr.first, pr.second);
            auto it = lambda_.find(key);
            if (it == lambda_.end())
                it = lambda_.emplace(key, edge_connectivity(mg_, key.first, key.second)).first;
            if (it->second < m) return false;
        }
        return true;
    }

    bool route(int idx, std::size_t j) {
        const auto& list = edges_at_[idx];
        if (j == list.size()) return place(idx + 1);
        const CanonEdge& c = list[j];
        if (sig_[c.tail] < 0 && sig_[c.head] < 0) {
            // Nothing pins this component yet: branch on the tail's shift.
            for (Element a = 0; a < G_.order(); ++a) {
                sig_[c.tail] = a;
                if (route(idx, j)) return true;
            }
            sig_[c.tail] = -1;
            return false;
        }
        prev_first_ = OrientedEdge{-1, false};
        if (j > 0) {
            const CanonEdge& p = list[j - 1];
            if (p.tail == c.tail && p.head == c.head && p.label == c.label)
                prev_first_ = walks_[p.pos].front();
        }
        if (!residual_ok(idx, j)) return false;
        cur_ = &c;
        cur_idx_ = idx;
        cur_j_ = j;
        Walk w;
        return extend(vmap_[c.tail], G_.identity(), w);
    }

    // Everything the rest of the search depends on at a partial trail, for
    // the current depth limit. The order in which the used edges were
    // walked is irrelevant.
    std::string state_key(Vertex at, Element lbl, bool fresh) const {
        std::string k;
        k.reserve(24 + 4 * (vmap_.size() + sig_.size()) + used_.size() / 8);
        auto put = [&](int x) { k.append(reinterpret_cast<const char*>(&x), sizeof x); };
        put(cur_idx_);
        put(static_cast<int>(cur_j_));
        put(at);
        put(lbl);
        put(fresh ? prev_first_.edge * 2 + (prev_first_.forward ? 1 : 0) : -2);
        for (Vertex v : vmap_) put(v);
        for (Element a : sig_) put(a);
        for (std::size_t f = 0; f < used_.size(); f += 8) {
            unsigned char byte = 0;
            for (std::size_t b = f; b < std::min(f + 8, used_.size()); ++b)
                if (used_[b]) byte |= static_cast<unsigned char>(1u << (b - f));
            k.push_back(static_cast<char>(byte));
        }
        return k;
    }

    // Necessary conditions on the unused host edges for routing every
    // pattern edge not yet routed: each mapped vertex needs enough free
    // edge-ends, and each mapped pair at the current level needs enough
    // edge-disjoint paths.
    bool residual_ok(int idx, std::size_t j) {
        std::vector<int> need(h_.vertex_count(), 0);
        const auto& list = edges_at_[idx];
        for (std::size_t i = j; i < list.size(); ++i) need[list[i].tail]++, need[list[i].head]++;
        for (std::size_t l = idx + 1; l < edges_at_.size(); ++l)
            for (const CanonEdge& c : edges_at_[l]) need[c.tail]++, need[c.head]++;
        std::vector<int> free(g_.vertex_count(), 0);
        for (int f = 0; f < g_.edge_count(); ++f)
            if (!used_[f]) free[mg_.edges[f].first]++, free[mg_.edges[f].second]++;
        for (Vertex a = 0; a < h_.vertex_count(); ++a)
            if (vmap_[a] >= 0 && need[a] > free[vmap_[a]]) return false;

        std::map<std::pair<Vertex, Vertex>, int> mult;
        for (std::size_t i = j; i < list.size(); ++i)
            if (list[i].tail != list[i].head) mult[std::minmax(vmap_[list[i].tail], vmap_[list[i].head])]++;
        for (const auto& [pr, m] : mult) {
            if (residual_net(g_.vertex_count()).max_flow(pr.first, pr.second, m) < m) return false;
        }
        return true;
    }

    bool complete(const Walk& w, Element lbl) {
        const CanonEdge& c = *cur_;
        bool set_tail = false, set_head = false;
        if (sig_[c.tail] >= 0 && sig_[c.head] >= 0) {
            Element need = G_.mul(G_.mul(G_.inv(sig_[c.tail]), c.label), sig_[c.head]);
            if (lbl != need) return false;
        } else if (sig_[c.tail] >= 0) {
            sig_[c.head] = G_.mul(G_.mul(G_.inv(c.label), sig_[c.tail]), lbl);
            set_head = true;
        } else {
            sig_[c.tail] = G_.mul(G_.mul(c.label, sig_[c.head]), G_.inv(lbl));
            set_tail = true;
        }
        walks_[c.pos] = w;
        ++routed_;
        const CanonEdge* saved = cur_;
        int saved_idx = cur_idx_;
        std::size_t saved_j = cur_j_;
        OrientedEdge saved_prev = prev_first_;
        bool ok = route(cur_idx_, cur_j_ + 1);
        cur_ = saved;
        cur_idx_ = saved_idx;
        cur_j_ = saved_j;
        prev_first_ = saved_prev;
        if (ok) return true;
        --routed_;
        walks_[c.pos].clear();
        if (set_head) sig_[c.head] = -1;
        if (set_tail) sig_[c.tail] = -1;
        return false;
    }

    bool extend(Vertex at, Element lbl, Walk& w) {
        tick();
        std::string key = state_key(at, lbl, w.empty());
        if (dead_.count(key) || failed_.count(key)) return false;
        const bool outer_cut = local_cut_;
        local_cut_ = false;
        if (search_from(at, lbl, w)) return true;
        // A failure that never hit the depth limit holds for every limit.
        auto& memo = local_cut_ ? failed_ : dead_;
        if (memo.size() < kMaxMemo) memo.insert(std::move(key));
        local_cut_ = local_cut_ || outer_cut;
        return false;
    }

    // The partial trail must still reach its end while the remaining trails
    // between the same two images also fit into the unused edges.
    bool can_finish(Vertex at) {
        const auto& list = edges_at_[cur_idx_];
        const Vertex x = vmap_[cur_->tail], y = vmap_[cur_->head];
        int more = 0;
        for (std::size_t i = cur_j_ + 1; i < list.size(); ++i)
            if (std::minmax(vmap_[list[i].tail], vmap_[list[i].head]) == std::minmax(x, y)) ++more;
        if (x == y) return true;
        const int n = g_.vertex_count();
        FlowNetwork& net = residual_net(n + 1);
        net.add_arc(n, at, 1);
        if (more > 0) net.add_arc(n, x, more);
        return net.max_flow(n, y, more + 1) == more + 1;
    }

    // Unused non-loop host edges as a unit-capacity network.
    FlowNetwork& residual_net(int nodes) {
        net_.reset(nodes);
        for (int f = 0; f < g_.edge_count(); ++f) {
            const auto& [a, b] = mg_.edges[f];
            if (!used_[f] && a != b) net_.add_undirected(a, b, 1);
        }
        return net_;
    }

    bool search_from(Vertex at, Element lbl, Walk& w) {
        if (!w.empty() && at == vmap_[cur_->head] && complete(w, lbl)) return true;
        if (!can_finish(at)) return false;
        const int still_needed = h_.edge_count() - routed_ - 1;
        for (int f : inc_[at]) {
            if (used_[f]) continue;
            const auto& [a, b] = mg_.edges[f];
            // Orientations available from `at`; a loop offers both.
            for (int dir = 0; dir < 2; ++dir) {
                bool forward = dir == 0;
                if ((forward ? a : b) != at) continue;
                OrientedEdge step{f, forward};
                if (w.empty() && prev_first_.edge >= 0 && !(prev_first_ < step)) continue;
                if (total_ + 1 + still_needed > limit_) {
                    cutoff_ = true;
                    local_cut_ = true;
                    continue;
                }
                Element next_lbl = G_.mul(lbl, g_.label({g_.edges()[f].id, forward}));
                used_[f] = 1;
                ++total_;
                w.push_back(step);
                bool ok = extend(forward ? b : a, next_lbl, w);
                w.pop_back();
                --total_;
                if (ok) return true;
                used_[f] = 0;
            }
        }
        return false;
    }

    Immersion build() const {
        Immersion im;
        im.vertex_map = vmap_;
        im.shift = identity_shift(g_);
        for (Vertex a = 0; a < h_.vertex_count(); ++a)
            if (sig_[a] >= 0) im.shift[vmap_[a]] = sig_[a];
        im.trails.resize(h_.edge_count());
        for (const auto& list : edges_at_)
            for (const CanonEdge& c : list) {
                Trail t = to_trail(g_, walks_[c.pos]);
                im.trails[c.pos] = c.flipped ? inverse(t) : t;
            }
        return im;
    }

    const LabeledGraph& g_;
    const LabeledGraph& h_;
    const FiniteGroup& G_;
    SearchBudget budget_;
    Multigraph mg_;
    std::vector<std::vector<int>> inc_;
    std::vector<int> ends_, hends_;
    std::vector<Vertex> order_;
    std::vector<int> rank_;
    std::vector<std::vector<CanonEdge>> edges_at_;
    std::map<std::pair<Vertex, Vertex>, int> lambda_;
    static constexpr std::size_t kMaxMemo = 1u << 22;
    std::unordered_set<std::string> failed_, dead_;
    bool local_cut_ = false;
    FlowNetwork net_{0};

    std::vector<Vertex> vmap_;
    std::vector<char> taken_;
    std::vector<Element> sig_;
    std::vector<char> used_;
    std::vector<Walk> walks_;
    int total_ = 0;
    int routed_ = 0;
    int limit_ = 0;
    bool cutoff_ = false;
    std::uint64_t nodes_ = 0;

    const CanonEdge* cur_ = nullptr;
    int cur_idx_ = 0;
    std::size_t cur_j_ = 0;
    OrientedEdge prev_first_{-1, false};
};

}  // namespace

ImmersionSearchResult find_immersion(const LabeledGraph& host, const LabeledGraph& pattern,
                                     SearchBudget budget) {
    require(host.G() == pattern.G(), ErrorCode::InvalidParameter,
            "host and pattern are labeled over different groups");
    ImmersionSearch search(host, pattern, budget);
    ImmersionSearchResult res = search.run();
    if (res.immersion) {
        ImmersionReport rep = verify_immersion(host, pattern, *res.immersion);
        require(rep.ok(), ErrorCode::Internal,
                std::string("search produced an invalid immersion: ") + to_string(rep.failed) + ": " +
                    rep.detail);
    }
    return res;
}

Tri forbids(const LabeledGraph& host, const LabeledGraph& pattern, SearchBudget budget) {
    ImmersionSearchResult r = find_immersion(host, pattern, budget);
    switch (r.status) {
    case SearchStatus::Found: return Tri::False;
    case SearchStatus::None: return Tri::True;
    case SearchStatus::Unknown: return Tri::Unknown;
    }
    return Tri::Unknown;
}

}  // namespace gammaforge
