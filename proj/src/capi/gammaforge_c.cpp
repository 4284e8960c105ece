#include "gammaforge/gammaforge.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "gammaforge/conn.hpp"
#include "gammaforge/decomp.hpp"
#include "gammaforge/error.hpp"
#include "gammaforge/flower.hpp"
#include "gammaforge/immerse.hpp"
#include "gammaforge/io.hpp"
#include "gammaforge/pack.hpp"
#include "gammaforge/selftest.hpp"
#include "json.hpp"

struct gf_group {
    gammaforge::GroupPtr group;
};

struct gf_graph {
    gammaforge::LabeledGraph graph;
};

namespace {

using namespace gammaforge;

thread_local std::string last_error;

gf_status status_of(ErrorCode c) {
    switch (c) {
    case ErrorCode::Parse: return GF_ERR_PARSE;
    case ErrorCode::Precondition:
    case ErrorCode::NoProperSubgroup:
    case ErrorCode::Structural:
    case ErrorCode::MalformedImmersion:
    case ErrorCode::InvalidCertificate: return GF_ERR_PRECONDITION;
    case ErrorCode::NotGenerating: return GF_ERR_NOT_GENERATING;
    case ErrorCode::BudgetExceeded: return GF_UNKNOWN;
    case ErrorCode::Internal: return GF_ERR_INTERNAL;
    case ErrorCode::InvalidParameter:
    case ErrorCode::InvalidTransition: return GF_ERR_INVALID;
    }
    return GF_ERR_INTERNAL;
}

template <class F>
gf_status guarded(F&& body) {
    try {
        last_error.clear();
        return body();
    } catch (const Error& e) {
        last_error = std::string(to_string(e.code())) + ": " + e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        last_error = std::string("internal: ") + e.what();
        return GF_ERR_INTERNAL;
    }
}

char* copy(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorCode::InvalidParameter, std::string(what) + " is NULL");
}

SearchBudget search_budget(unsigned long long b) {
    SearchBudget out;
    if (b) out.max_nodes = b;
    return out;
}

PackBudget pack_budget(unsigned long long b) {
    PackBudget out;
    if (b) out.max_nodes = b;
    return out;
}

}  // namespace

extern "C" {

const char* gf_version(void) { return "0.1.0"; }

const char* gf_last_error(void) { return last_error.c_str(); }

void gf_string_free(char* s) { std::free(s); }

gf_status gf_group_parse(const char* text, gf_group** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = new gf_group{io::parse_group(text)};
        return GF_OK;
    });
}

void gf_group_free(gf_group* g) { delete g; }

int gf_group_order(const gf_group* g) { return g ? g->group->order() : 0; }

gf_status gf_group_to_json(const gf_group* g, char** out) {
    return guarded([&] {
        need(g, "group");
        need(out, "out");
        *out = copy(io::group_to_json(*g->group));
        return GF_OK;
    });
}

gf_status gf_graph_from_json(const char* json, gf_graph** out) {
    return guarded([&] {
        need(json, "json");
        need(out, "out");
        *out = new gf_graph{io::parse_graph(json)};
        return GF_OK;
    });
}

void gf_graph_free(gf_graph* g) { delete g; }

gf_status gf_graph_to_json(const gf_graph* g, char** out) {
    return guarded([&] {
        need(g, "graph");
        need(out, "out");
        *out = copy(io::graph_to_json(g->graph));
        return GF_OK;
    });
}

int gf_graph_vertex_count(const gf_graph* g) { return g ? g->graph.vertex_count() : 0; }

int gf_graph_edge_count(const gf_graph* g) { return g ? g->graph.edge_count() : 0; }

gf_status gf_make_flower(const char* kind, const gf_group* group, int k, int n, const int* generators,
                         int generator_count, gf_graph** out) {
    return guarded([&] {
        need(kind, "kind");
        need(out, "out");
        FlowerSpec spec;
        std::string kd = kind;
        if (kd == "plain") spec.kind = FlowerKind::Plain;
        else if (kd == "rich") spec.kind = FlowerKind::Rich;
        else if (kd == "generating") spec.kind = FlowerKind::Generating;
        else fail(ErrorCode::InvalidParameter, "unknown flower kind \"" + kd + "\"");
        spec.k = k;
        spec.n = n;
        if (group) spec.group = group->group;
        if (generator_count > 0) {
            need(generators, "generators");
            spec.generators.assign(generators, generators + generator_count);
        }
        if (spec.kind != FlowerKind::Plain)
            require(spec.group != nullptr, ErrorCode::InvalidParameter, "rich and generating flowers need a group");
        *out = new gf_graph{build_flower(spec)};
        return GF_OK;
    });
}

gf_status gf_find_immersion(const gf_graph* host, const gf_graph* pattern, unsigned long long budget, char** out) {
    return guarded([&] {
        need(host, "host");
        need(pattern, "pattern");
        need(out, "out");
        ImmersionSearchResult r = find_immersion(host->graph, pattern->graph, search_budget(budget));
        *out = copy(io::search_result_to_json(host->graph, pattern->graph, r));
        switch (r.status) {
        case SearchStatus::Found: return GF_OK;
        case SearchStatus::None: return GF_NEGATIVE;
        case SearchStatus::Unknown: break;
        }
        return GF_UNKNOWN;
    });
}

gf_status gf_pack_circuits(const gf_graph* g, const char* center, const char* subgroup, int r,
                           unsigned long long budget, char** out) {
    return guarded([&] {
        need(g, "graph");
        need(center, "center");
        need(out, "out");
        const LabeledGraph& lg = g->graph;
        auto x = lg.find_vertex(center);
        require(x.has_value(), ErrorCode::InvalidParameter, std::string("unknown vertex \"") + center + "\"");
        auto gens = io::parse_element_list(lg.G(), subgroup ? subgroup : "");
        Subgroup sub = generate_subgroup(lg.group(), gens);
        PackOrCover pc = erdos_posa(lg, *x, sub, r, pack_budget(budget));
        *out = copy(io::pack_or_cover_to_json(lg, *x, sub, r, pc));
        return GF_OK;
    });
}

gf_status gf_tcores(const gf_graph* g, int t, char** out) {
    return guarded([&] {
        need(g, "graph");
        need(out, "out");
        require(t >= 0, ErrorCode::InvalidParameter, "t must be nonnegative");
        CorePartition cp = t_cores(g->graph.underlying(), t);
        *out = copy(io::partition_to_json(g->graph, "cores", cp.cores, t));
        return GF_OK;
    });
}

gf_status gf_edge_blocks(const gf_graph* g, char** out) {
    return guarded([&] {
        need(g, "graph");
        need(out, "out");
        *out = copy(io::partition_to_json(g->graph, "blocks", edge_blocks(g->graph.underlying())));
        return GF_OK;
    });
}

gf_status gf_value(const gf_graph* g, const char* bag, char** out) {
    return guarded([&] {
        need(g, "graph");
        need(bag, "bag");
        need(out, "out");
        SetValue v = set_value(g->graph, io::parse_vertex_list(g->graph, bag));
        *out = copy(io::set_value_to_json(g->graph, v));
        return GF_OK;
    });
}

gf_status gf_decompose(const gf_graph* g, const gf_decompose_options* opts, char** out) {
    return guarded([&] {
        need(g, "graph");
        need(opts, "options");
        need(out, "out");
        DecomposeOptions o;
        o.k = opts->k;
        o.n = opts->n;
        if (opts->override_t > 0) o.override_t = opts->override_t;
        if (opts->outcome_bound > 0) o.outcome_bound = opts->outcome_bound;
        o.budget = pack_budget(opts->budget);
        DecomposeResult d = structure_decompose(g->graph, o);
        *out = copy(io::decomposition_to_json(g->graph, d));
        return d.rich ? GF_NEGATIVE : GF_OK;
    });
}

namespace {

std::pair<int, int> resolve_tn(const io::ParsedDecomposition& d, int t, int n) {
    int tt = t > 0 ? t : d.t.value_or(0);
    int nn = n > 0 ? n : d.outcome_bound.value_or(0);
    require(tt > 0, ErrorCode::InvalidParameter, "t is neither given nor stored in the decomposition");
    require(nn > 0, ErrorCode::InvalidParameter, "n is neither given nor stored in the decomposition");
    return {tt, nn};
}

}  // namespace

gf_status gf_verify(const gf_graph* g, const char* decomposition, int t, int n, char** out) {
    return guarded([&] {
        need(g, "graph");
        need(decomposition, "decomposition");
        need(out, "out");
        io::ParsedDecomposition d = io::parse_decomposition(g->graph, decomposition);
        auto [tt, nn] = resolve_tn(d, t, n);
        StructureReport rep = verify_structure(g->graph, d.shift, d.tree, tt, nn);
        *out = copy(io::structure_report_to_json(g->graph, rep, tt, nn));
        return rep.ok ? GF_OK : GF_NEGATIVE;
    });
}

gf_status gf_check_converse(const gf_graph* g, const char* decomposition, int t, int n, unsigned long long budget,
                            char** out) {
    return guarded([&] {
        need(g, "graph");
        need(decomposition, "decomposition");
        need(out, "out");
        io::ParsedDecomposition d = io::parse_decomposition(g->graph, decomposition);
        auto [tt, nn] = resolve_tn(d, t, n);
        Tri r = check_converse(g->graph, d.shift, d.tree, tt, nn, search_budget(budget));
        nlohmann::json j{{"forbids", to_string(r)}, {"t", tt}, {"n", nn}};
        if (r == Tri::False) j["warning"] = "the graph admits the rich flower although the decomposition verifies";
        *out = copy(j.dump(2) + "\n");
        switch (r) {
        case Tri::True: return GF_OK;
        case Tri::False: return GF_NEGATIVE;
        case Tri::Unknown: break;
        }
        return GF_UNKNOWN;
    });
}

gf_status gf_export_dot(const gf_graph* g, const char* decomposition, char** out) {
    return guarded([&] {
        need(g, "graph");
        need(decomposition, "decomposition");
        need(out, "out");
        io::ParsedDecomposition d = io::parse_decomposition(g->graph, decomposition);
        std::vector<BagOutcome> outcomes;
        if (d.t && d.outcome_bound) {
            StructureReport rep = verify_structure(g->graph, d.shift, d.tree, *d.t, *d.outcome_bound);
            for (const auto& b : rep.bags) outcomes.push_back(b.outcome);
        } else {
            std::string p = decomposition_problem(g->graph.vertex_count(), d.tree);
            require(p.empty(), ErrorCode::Structural, "not a tree-cut decomposition: " + p);
        }
        *out = copy(to_dot(g->graph, d.tree, outcomes));
        return GF_OK;
    });
}

gf_status gf_selftest(unsigned long long seed, char** out) {
    return guarded([&] {
        need(out, "out");
        auto checks = run_selftest(seed);
        nlohmann::json arr = nlohmann::json::array();
        bool ok = true;
        for (const auto& c : checks) {
            nlohmann::json jc{{"name", c.name}, {"passed", c.passed}};
            if (!c.detail.empty()) jc["detail"] = c.detail;
            arr.push_back(jc);
            ok = ok && c.passed;
        }
        *out = copy(nlohmann::json{{"checks", arr}, {"seed", seed}, {"ok", ok}}.dump(2) + "\n");
        return ok ? GF_OK : GF_NEGATIVE;
    });
}

}  // extern "C"
