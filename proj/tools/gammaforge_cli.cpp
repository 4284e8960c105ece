#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gammaforge/gammaforge.h"

namespace {

enum Exit { Ok = 0, Negative = 1, Unknown = 2, Usage = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GroupDel {
    void operator()(gf_group* g) const { gf_group_free(g); }
};
struct GraphDel {
    void operator()(gf_graph* g) const { gf_graph_free(g); }
};
using GroupHandle = std::unique_ptr<gf_group, GroupDel>;
using GraphHandle = std::unique_ptr<gf_graph, GraphDel>;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GraphHandle load_graph(const std::string& path) {
    gf_graph* g = nullptr;
    gf_status s = gf_graph_from_json(read_file(path).c_str(), &g);
    if (s != GF_OK) throw UsageError(path + ": " + gf_last_error());
    return GraphHandle(g);
}

unsigned long long default_budget() {
    const char* env = std::getenv("GAMMA_FORGE_BUDGET");
    if (!env || !*env) return 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0) throw UsageError("GAMMA_FORGE_BUDGET must be a positive integer");
    return v;
}

struct Config {
    unsigned long long budget = 0;
    unsigned long long seed = 1;
    std::string output;
};

// Writes the artifact and translates the status into an exit code.
int finish(const Config& cfg, gf_status s, char* text) {
    std::unique_ptr<char, void (*)(char*)> owned(text, gf_string_free);
    if (text) {
        if (cfg.output.empty()) {
            std::fputs(text, stdout);
        } else {
            std::ofstream out(cfg.output, std::ios::binary);
            if (!out) throw UsageError("cannot write " + cfg.output);
            out << text;
        }
    }
    switch (s) {
    case GF_OK: return Ok;
    case GF_NEGATIVE: return Negative;
    case GF_UNKNOWN:
        if (!text) std::cerr << "gammaforge: " << gf_last_error() << "\n";
        return Unknown;
    case GF_ERR_INVALID:
    case GF_ERR_PARSE:
    case GF_ERR_PRECONDITION:
        std::cerr << "gammaforge: " << gf_last_error() << "\n";
        return Usage;
    case GF_ERR_NOT_GENERATING:
    case GF_ERR_INTERNAL: break;
    }
    std::cerr << "gammaforge: " << gf_last_error() << "\n";
    return Usage;
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stoi(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("not an integer list: " + s);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-labeled graph immersions, circuit packing and tree-cut decompositions."};
    app.set_version_flag("--version", std::string(gf_version()));
    app.require_subcommand(1);
    app.fallthrough();

    Config cfg;
    auto* budget_opt = app.add_option("--budget", cfg.budget,
                   "Node-expansion cap per search (default: $GAMMA_FORGE_BUDGET, else the built-in cap)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "Seed for randomized fixtures (selftest)");
    app.add_option("--output,-o", cfg.output, "Write the artifact here instead of stdout");

    // make-flower
    auto* mf = app.add_subcommand("make-flower", "Emit a plain, rich or generating flower as a JSON graph");
    std::string mf_kind = "plain", mf_group = "trivial", mf_gens;
    int mf_k = 1, mf_n = 1;
    mf->add_option("--kind", mf_kind, "plain | rich | generating")
        ->check(CLI::IsMember({"plain", "rich", "generating"}));
    mf->add_option("--group", mf_group, "z<m>, s<m>, trivial, or a JSON group file");
    mf->add_option("--k", mf_k, "Parallel edges per petal (per label for rich flowers)")->check(CLI::PositiveNumber);
    mf->add_option("--n", mf_n, "Number of petals")->check(CLI::PositiveNumber);
    mf->add_option("--generators", mf_gens, "Comma-separated element indices (generating flowers)");

    // find-immersion
    auto* fi = app.add_subcommand("find-immersion", "Search for an immersion of the pattern in the host");
    std::string fi_host, fi_pattern;
    fi->add_option("--host", fi_host, "Host graph JSON")->required();
    fi->add_option("--pattern", fi_pattern, "Pattern graph JSON")->required();

    // pack-circuits
    auto* pc = app.add_subcommand("pack-circuits",
                                  "Find r circuits at the center labeled outside a subgroup, or a small cover");
    std::string pc_graph, pc_center, pc_sub;
    int pc_r = 1;
    pc->add_option("--graph", pc_graph, "Graph JSON")->required();
    pc->add_option("--center", pc_center, "Center vertex name")->required();
    pc->add_option("--subgroup", pc_sub, "Comma-separated generator indices of the subgroup");
    pc->add_option("--r", pc_r, "Packing size")->check(CLI::PositiveNumber);

    // tcores
    auto* tc = app.add_subcommand("tcores", "Partition into t-cores");
    std::string tc_graph;
    int tc_t = 1;
    tc->add_option("--graph", tc_graph, "Graph JSON")->required();
    tc->add_option("--t", tc_t, "Connectivity threshold")->required()->check(CLI::NonNegativeNumber);

    // edge-blocks
    auto* eb = app.add_subcommand("edge-blocks", "Partition into 2-edge-connected blocks");
    std::string eb_graph;
    eb->add_option("--graph", eb_graph, "Graph JSON")->required();

    // value
    auto* va = app.add_subcommand("value", "Compute the value of a vertex set with a certificate");
    std::string va_graph, va_bag;
    va->add_option("--graph", va_graph, "Graph JSON")->required();
    va->add_option("--bag", va_bag, "Comma-separated vertex names")->required();

    // decompose
    auto* de = app.add_subcommand("decompose", "Build a shift and tree-cut decomposition, or a rich flower");
    std::string de_graph;
    int de_k = 1, de_n = 1, de_t = 0, de_bound = 0;
    de->add_option("--graph", de_graph, "Graph JSON")->required();
    de->add_option("--k", de_k, "Flower width k")->check(CLI::PositiveNumber);
    de->add_option("--n", de_n, "Flower petals n")->check(CLI::PositiveNumber);
    de->add_option("--override-t", de_t, "Use this t instead of the theorem's value (flagged in output)")
        ->check(CLI::PositiveNumber);
    de->add_option("--outcome-bound", de_bound, "Bound for the few-high-degree outcome (default n|G|)")
        ->check(CLI::PositiveNumber);

    // verify
    auto* ve = app.add_subcommand("verify", "Check every bag of a decomposition");
    std::string ve_graph, ve_decomp;
    int ve_t = 0, ve_n = 0;
    ve->add_option("--graph", ve_graph, "Graph JSON")->required();
    ve->add_option("--decomp", ve_decomp, "Decomposition JSON")->required();
    ve->add_option("--t", ve_t, "Override the stored t")->check(CLI::PositiveNumber);
    ve->add_option("--n", ve_n, "Override the stored outcome bound")->check(CLI::PositiveNumber);

    // check-converse
    auto* cc = app.add_subcommand("check-converse",
                                  "Verify a decomposition, then confirm the graph forbids the rich (t+1, n)-flower");
    std::string cc_graph, cc_decomp;
    int cc_t = 0, cc_n = 0;
    cc->add_option("--graph", cc_graph, "Graph JSON")->required();
    cc->add_option("--decomp", cc_decomp, "Decomposition JSON")->required();
    cc->add_option("--t", cc_t, "Override the stored t")->check(CLI::PositiveNumber);
    cc->add_option("--n", cc_n, "Override the stored outcome bound")->check(CLI::PositiveNumber);

    // export-dot
    auto* ed = app.add_subcommand("export-dot", "Render a decomposition tree as DOT");
    std::string ed_graph, ed_decomp;
    ed->add_option("--graph", ed_graph, "Graph JSON")->required();
    ed->add_option("--decomp", ed_decomp, "Decomposition JSON")->required();

    // selftest
    auto* st = app.add_subcommand("selftest", "Run the built-in invariant suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (budget_opt->count() == 0) cfg.budget = default_budget();
        char* out = nullptr;
        gf_status s = GF_OK;
        if (mf->parsed()) {
            GroupHandle grp;
            std::string spec = mf_group;
            if (spec.find('{') == std::string::npos && spec.find('.') != std::string::npos) spec = read_file(spec);
            gf_group* raw = nullptr;
            if (gf_group_parse(spec.c_str(), &raw) != GF_OK) throw UsageError(gf_last_error());
            grp.reset(raw);
            std::vector<int> gens = parse_ints(mf_gens);
            gf_graph* g = nullptr;
            s = gf_make_flower(mf_kind.c_str(), grp.get(), mf_k, mf_n, gens.data(), static_cast<int>(gens.size()),
                               &g);
            GraphHandle owned(g);
            if (s == GF_OK) s = gf_graph_to_json(g, &out);
        } else if (fi->parsed()) {
            auto host = load_graph(fi_host);
            auto pattern = load_graph(fi_pattern);
            s = gf_find_immersion(host.get(), pattern.get(), cfg.budget, &out);
        } else if (pc->parsed()) {
            auto g = load_graph(pc_graph);
            s = gf_pack_circuits(g.get(), pc_center.c_str(), pc_sub.c_str(), pc_r, cfg.budget, &out);
        } else if (tc->parsed()) {
            auto g = load_graph(tc_graph);
            s = gf_tcores(g.get(), tc_t, &out);
        } else if (eb->parsed()) {
            auto g = load_graph(eb_graph);
            s = gf_edge_blocks(g.get(), &out);
        } else if (va->parsed()) {
            auto g = load_graph(va_graph);
            s = gf_value(g.get(), va_bag.c_str(), &out);
        } else if (de->parsed()) {
            auto g = load_graph(de_graph);
            gf_decompose_options o{de_k, de_n, de_t, de_bound, cfg.budget};
            s = gf_decompose(g.get(), &o, &out);
        } else if (ve->parsed()) {
            auto g = load_graph(ve_graph);
            s = gf_verify(g.get(), read_file(ve_decomp).c_str(), ve_t, ve_n, &out);
        } else if (cc->parsed()) {
            auto g = load_graph(cc_graph);
            s = gf_check_converse(g.get(), read_file(cc_decomp).c_str(), cc_t, cc_n, cfg.budget, &out);
        } else if (ed->parsed()) {
            auto g = load_graph(ed_graph);
            s = gf_export_dot(g.get(), read_file(ed_decomp).c_str(), &out);
        } else if (st->parsed()) {
            s = gf_selftest(cfg.seed, &out);
        }
        return finish(cfg, s, out);
    } catch (const UsageError& e) {
        std::cerr << "gammaforge: " << e.what() << "\n";
        return Usage;
    }
}
