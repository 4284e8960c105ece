#include "gammaforge/io.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "gammaforge/error.hpp"
#include "json.hpp"

namespace gammaforge::io {

using json = nlohmann::json;

namespace {

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Parse, std::string(what) + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
    fail(ErrorCode::Parse, path + ": " + msg);
}

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) bad(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) bad(path, std::string("missing \"") + key + "\"");
    return *it;
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path, "expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) bad(path, "expected a string");
    return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array");
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

GroupPtr group_from_spec(const std::string& spec) {
    std::string s;
    for (char c : spec) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "trivial") return make_cyclic(1);
    if (s.size() >= 2 && (s[0] == 'z' || s[0] == 's') &&
        std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        int m = std::stoi(s.substr(1));
        return s[0] == 'z' ? make_cyclic(m) : make_symmetric(m);
    }
    fail(ErrorCode::Parse, "unknown group \"" + spec + "\" (expected z<m>, s<m>, trivial or a JSON object)");
}

GroupPtr group_from(const json& j, const std::string& path) {
    if (j.is_string()) return group_from_spec(j.get<std::string>());
    if (!j.is_object()) bad(path, "expected a group object or name");
    if (j.contains("cyclic")) return make_cyclic(as_int(j["cyclic"], path + ".cyclic"));
    if (j.contains("symmetric")) return make_symmetric(as_int(j["symmetric"], path + ".symmetric"));
    int order = as_int(field(j, "order", path), path + ".order");
    const json& rows = as_array(field(j, "table", path), path + ".table");
    if (static_cast<int>(rows.size()) != order) bad(path + ".table", "row count differs from order");
    std::vector<std::vector<Element>> table;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::string rp = path + ".table[" + std::to_string(r) + "]";
        std::vector<Element> row;
        for (const json& x : as_array(rows[r], rp)) row.push_back(as_int(x, rp));
        table.push_back(std::move(row));
    }
    std::string name = j.contains("name") ? as_string(j["name"], path + ".name") : std::string();
    return make_group(FiniteGroup::from_table(std::move(table), std::move(name)));
}

json group_json(const FiniteGroup& g) {
    const std::string& name = g.name();
    if (name.size() >= 2 && (name[0] == 'Z' || name[0] == 'S')) {
        try {
            int m = std::stoi(name.substr(1));
            if (name[0] == 'Z' && m >= 1 && *make_cyclic(m) == g) return json{{"cyclic", m}};
            if (name[0] == 'S' && m >= 1 && m <= 5 && *make_symmetric(m) == g) return json{{"symmetric", m}};
        } catch (const std::exception&) {
        }
    }
    json j{{"order", g.order()}, {"table", g.table()}};
    if (!name.empty()) j["name"] = name;
    return j;
}

json graph_json(const LabeledGraph& g) {
    json edges = json::array();
    std::vector<Edge> sorted = g.edges();
    std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
    for (const Edge& e : sorted)
        edges.push_back({{"id", e.id},
                         {"tail", g.vertex_name(e.tail)},
                         {"head", g.vertex_name(e.head)},
                         {"label", e.label}});
    return {{"group", group_json(g.G())}, {"vertices", g.vertex_names()}, {"edges", edges}};
}

json names(const LabeledGraph& g, const VertexSet& s) {
    json a = json::array();
    for (Vertex v : s) a.push_back(g.vertex_name(v));
    return a;
}

json trail_json(const Trail& t) {
    json steps = json::array();
    for (OrientedEdge s : t.steps) steps.push_back({{"edge", s.edge}, {"forward", s.forward}});
    return steps;
}

Trail trail_from(const json& j, const std::string& path) {
    Trail t;
    const json& steps = as_array(j, path);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::string sp = path + "[" + std::to_string(i) + "]";
        const json& fwd = field(steps[i], "forward", sp);
        if (!fwd.is_boolean()) bad(sp + ".forward", "expected a boolean");
        t.steps.push_back({as_int(field(steps[i], "edge", sp), sp + ".edge"), fwd.get<bool>()});
    }
    return t;
}

Vertex vertex_named(const LabeledGraph& g, const json& j, const std::string& path) {
    std::string name = as_string(j, path);
    auto v = g.find_vertex(name);
    if (!v) bad(path, "unknown vertex \"" + name + "\"");
    return *v;
}

json shift_json(const LabeledGraph& g, const ShiftAssignment& s) {
    json j = json::object();
    for (Vertex v = 0; v < g.vertex_count(); ++v) j[g.vertex_name(v)] = s.at(v);
    return j;
}

ShiftAssignment shift_from(const LabeledGraph& g, const json& j, const std::string& path) {
    ShiftAssignment s = identity_shift(g);
    if (!j.is_object()) bad(path, "expected an object of vertex -> element");
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto v = g.find_vertex(it.key());
        if (!v) bad(path, "unknown vertex \"" + it.key() + "\"");
        Element a = as_int(it.value(), path + "." + it.key());
        if (!g.G().contains(a)) bad(path + "." + it.key(), "element outside the group");
        s[*v] = a;
    }
    return s;
}

json certificate_json(const LabeledGraph& g, const Certificate& c) {
    return {{"bag", names(g, c.bag)},
            {"edges", c.edges},
            {"shift", shift_json(g, c.shift)},
            {"subgroup", c.subgroup.elements()}};
}

std::vector<std::string> split(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    out.push_back(cur);
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

}  // namespace

GroupPtr parse_group(std::string_view text) {
    std::string_view trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
    if (!trimmed.empty() && trimmed.front() != '{' && trimmed.front() != '"') return group_from_spec(std::string(trimmed));
    return group_from(parse_json(text, "group"), "group");
}

std::string group_to_json(const FiniteGroup& g) { return dump(group_json(g)); }

LabeledGraph parse_graph(std::string_view text) {
    json j = parse_json(text, "graph");
    GroupPtr group = group_from(field(j, "group", "graph"), "graph.group");
    std::vector<std::string> vertices;
    const json& vs = as_array(field(j, "vertices", "graph"), "graph.vertices");
    std::map<std::string, Vertex> index;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        std::string name = as_string(vs[i], "graph.vertices[" + std::to_string(i) + "]");
        if (!index.emplace(name, static_cast<Vertex>(i)).second)
            bad("graph.vertices[" + std::to_string(i) + "]", "duplicate vertex \"" + name + "\"");
        vertices.push_back(std::move(name));
    }
    std::vector<Edge> edges;
    const json& es = as_array(field(j, "edges", "graph"), "graph.edges");
    for (std::size_t i = 0; i < es.size(); ++i) {
        std::string ep = "graph.edges[" + std::to_string(i) + "]";
        Edge e;
        e.id = as_int(field(es[i], "id", ep), ep + ".id");
        for (auto [key, slot] : {std::pair{"tail", &e.tail}, std::pair{"head", &e.head}}) {
            std::string name = as_string(field(es[i], key, ep), ep + "." + key);
            auto it = index.find(name);
            if (it == index.end()) bad(ep + "." + key, "unknown vertex \"" + name + "\"");
            *slot = it->second;
        }
        e.label = es[i].contains("label") ? as_int(es[i]["label"], ep + ".label") : group->identity();
        edges.push_back(e);
    }
    try {
        return LabeledGraph(group, std::move(vertices), std::move(edges));
    } catch (const Error& e) {
        fail(ErrorCode::Parse, std::string("graph: ") + e.what());
    }
}

std::string graph_to_json(const LabeledGraph& g) { return dump(graph_json(g)); }

VertexSet parse_vertex_list(const LabeledGraph& g, std::string_view text) {
    VertexSet out;
    for (const std::string& name : split(text)) {
        auto v = g.find_vertex(name);
        require(v.has_value(), ErrorCode::Parse, "unknown vertex \"" + name + "\"");
        out.push_back(*v);
    }
    return normalized(out);
}

std::vector<Element> parse_element_list(const FiniteGroup& grp, std::string_view text) {
    std::vector<Element> out;
    for (const std::string& tok : split(text)) {
        require(!tok.empty() && std::all_of(tok.begin(), tok.end(),
                                            [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }),
                ErrorCode::Parse, "expected an element index, got \"" + tok + "\"");
        Element a = std::stoi(tok);
        require(grp.contains(a), ErrorCode::Parse, "element " + tok + " is outside the group");
        out.push_back(a);
    }
    return out;
}

std::string immersion_to_json(const LabeledGraph& host, const LabeledGraph& pattern, const Immersion& im) {
    json vm = json::object();
    for (Vertex v = 0; v < pattern.vertex_count(); ++v)
        vm[pattern.vertex_name(v)] = host.vertex_name(im.vertex_map.at(v));
    json trails = json::array();
    for (int p = 0; p < pattern.edge_count(); ++p)
        trails.push_back({{"pattern_edge", pattern.edges()[p].id}, {"steps", trail_json(im.trails.at(p))}});
    std::sort(trails.begin(), trails.end(),
              [](const json& a, const json& b) { return a["pattern_edge"] < b["pattern_edge"]; });
    json j{{"vertex_map", vm}, {"trails", trails}, {"shift", shift_json(host, im.shift)}};
    if (!im.audit.empty()) j["audit"] = im.audit;
    return dump(j);
}

Immersion parse_immersion(const LabeledGraph& host, const LabeledGraph& pattern, std::string_view text) {
    json j = parse_json(text, "immersion");
    Immersion im;
    im.vertex_map.assign(pattern.vertex_count(), -1);
    const json& vm = field(j, "vertex_map", "immersion");
    if (!vm.is_object()) bad("immersion.vertex_map", "expected an object");
    for (auto it = vm.begin(); it != vm.end(); ++it) {
        auto pv = pattern.find_vertex(it.key());
        if (!pv) bad("immersion.vertex_map", "unknown pattern vertex \"" + it.key() + "\"");
        im.vertex_map[*pv] = vertex_named(host, it.value(), "immersion.vertex_map." + it.key());
    }
    for (Vertex v : im.vertex_map)
        if (v < 0) bad("immersion.vertex_map", "some pattern vertex is unmapped");
    im.trails.resize(pattern.edge_count());
    std::vector<char> seen(pattern.edge_count(), 0);
    const json& ts = as_array(field(j, "trails", "immersion"), "immersion.trails");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::string tp = "immersion.trails[" + std::to_string(i) + "]";
        int id = as_int(field(ts[i], "pattern_edge", tp), tp + ".pattern_edge");
        int p = pattern.position(id);
        if (p < 0) bad(tp, "unknown pattern edge " + std::to_string(id));
        if (seen[p]) bad(tp, "pattern edge " + std::to_string(id) + " listed twice");
        seen[p] = 1;
        im.trails[p] = trail_from(field(ts[i], "steps", tp), tp + ".steps");
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) bad("immersion.trails", "some pattern edge has no trail");
    im.shift = j.contains("shift") ? shift_from(host, j["shift"], "immersion.shift") : identity_shift(host);
    if (j.contains("audit"))
        for (const json& a : as_array(j["audit"], "immersion.audit")) im.audit.push_back(as_string(a, "immersion.audit"));
    return im;
}

std::string search_result_to_json(const LabeledGraph& host, const LabeledGraph& pattern,
                                  const ImmersionSearchResult& r) {
    if (r.status == SearchStatus::Found) {
        json j = json::parse(immersion_to_json(host, pattern, *r.immersion));
        j["result"] = "found";
        j["nodes"] = r.nodes;
        return dump(j);
    }
    return dump(json{{"result", to_string(r.status)}, {"nodes", r.nodes}});
}

std::string pack_or_cover_to_json(const LabeledGraph& g, Vertex x, const Subgroup& sub, int r, const PackOrCover& p) {
    json j{{"center", g.vertex_name(x)}, {"subgroup", sub.elements()}, {"r", r}, {"transcript", p.transcript}};
    if (p.packing) {
        j["result"] = "packing";
        json cs = json::array();
        for (const Trail& c : p.packing->circuits) cs.push_back({{"steps", trail_json(c)}, {"label", trail_label(g, c)}});
        j["circuits"] = cs;
    } else {
        j["result"] = "cover";
        j["cover"] = p.cover.value_or(std::vector<int>{});
    }
    return dump(j);
}

std::string partition_to_json(const LabeledGraph& g, std::string_view key, const std::vector<VertexSet>& parts,
                              std::optional<int> t) {
    json a = json::array();
    for (const auto& s : parts) a.push_back(names(g, s));
    json j{{std::string(key), a}};
    if (t) j["t"] = *t;
    return dump(j);
}

std::string set_value_to_json(const LabeledGraph& g, const SetValue& v) {
    return dump(json{{"value", v.value}, {"certificate", certificate_json(g, v.certificate)}});
}

std::string decomposition_to_json(const LabeledGraph& g, const DecomposeResult& d) {
    json j{{"t", d.t},
           {"t_overridden", d.t_overridden},
           {"outcome_bound", d.outcome_bound},
           {"notes", d.notes}};
    j["theorem_t"] = d.theorem_t ? json(*d.theorem_t) : json(nullptr);
    if (d.rich) {
        j["result"] = "rich-flower";
        j["rich_flower"] = json::parse(graph_to_json(d.rich->flower));
        j["immersion"] = json::parse(immersion_to_json(g, d.rich->flower, d.rich->immersion));
        return dump(j);
    }
    j["result"] = "decomposition";
    j["gamma_shift"] = shift_json(g, d.shift);
    json tree = json::array();
    for (auto [a, b] : d.tree.tree_edges) tree.push_back({a, b});
    j["tree"] = tree;
    json bags = json::array();
    for (const auto& b : d.tree.bags) bags.push_back(names(g, b));
    j["bags"] = bags;
    json outcomes = json::array();
    for (BagOutcome o : d.outcomes) outcomes.push_back(to_string(o));
    j["outcomes"] = outcomes;
    json containers = json::array();
    for (const auto& c : d.containers.containers) containers.push_back(names(g, c));
    j["containers"] = containers;
    return dump(j);
}

ParsedDecomposition parse_decomposition(const LabeledGraph& g, std::string_view text) {
    json j = parse_json(text, "decomposition");
    ParsedDecomposition out;
    out.shift = j.contains("gamma_shift") ? shift_from(g, j["gamma_shift"], "decomposition.gamma_shift")
                                          : identity_shift(g);
    const json& bags = as_array(field(j, "bags", "decomposition"), "decomposition.bags");
    for (std::size_t i = 0; i < bags.size(); ++i) {
        std::string bp = "decomposition.bags[" + std::to_string(i) + "]";
        VertexSet b;
        const json& vs = as_array(bags[i], bp);
        for (std::size_t k = 0; k < vs.size(); ++k) b.push_back(vertex_named(g, vs[k], bp));
        out.tree.bags.push_back(normalized(b));
    }
    const json& tree = as_array(field(j, "tree", "decomposition"), "decomposition.tree");
    for (std::size_t i = 0; i < tree.size(); ++i) {
        std::string tp = "decomposition.tree[" + std::to_string(i) + "]";
        const json& e = as_array(tree[i], tp);
        if (e.size() != 2) bad(tp, "expected a pair of node ids");
        out.tree.tree_edges.emplace_back(as_int(e[0], tp), as_int(e[1], tp));
    }
    if (j.contains("t") && !j["t"].is_null()) out.t = as_int(j["t"], "decomposition.t");
    if (j.contains("outcome_bound")) out.outcome_bound = as_int(j["outcome_bound"], "decomposition.outcome_bound");
    return out;
}

std::string structure_report_to_json(const LabeledGraph& g, const StructureReport& r, int t, int n) {
    json bags = json::array();
    for (const BagReport& b : r.bags) {
        json jb{{"node", b.node},
                {"outcome", to_string(b.outcome)},
                {"high_degree", names(g, b.high_degree)},
                {"heavy_branches", b.heavy_branches}};
        if (b.value >= 0) jb["best_value"] = b.value;
        if (b.certificate) jb["certificate"] = certificate_json(g, *b.certificate);
        if (!b.detail.empty()) jb["detail"] = b.detail;
        bags.push_back(jb);
    }
    return dump(json{{"ok", r.ok}, {"t", t}, {"outcome_bound", n}, {"bags", bags}});
}

}  // namespace gammaforge::io
