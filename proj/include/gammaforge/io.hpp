#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gammaforge/conn.hpp"
#include "gammaforge/decomp.hpp"
#include "gammaforge/group.hpp"
#include "gammaforge/immerse.hpp"
#include "gammaforge/lgraph.hpp"
#include "gammaforge/pack.hpp"

namespace gammaforge::io {

// All readers throw Error{Parse} with a location on malformed input. All
// writers produce canonical JSON: sorted keys, sorted sets, two-space indent.

/// Accepts "z<m>", "s<m>", "trivial", or a JSON group object:
/// {"cyclic": m}, {"symmetric": m}, {"name"?, "order", "table"}.
GroupPtr parse_group(std::string_view text);
std::string group_to_json(const FiniteGroup& g);

LabeledGraph parse_graph(std::string_view text);
std::string graph_to_json(const LabeledGraph& g);

/// Vertex names, resolved against g.
VertexSet parse_vertex_list(const LabeledGraph& g, std::string_view comma_separated);
/// Element indices separated by commas; empty string gives no elements.
std::vector<Element> parse_element_list(const FiniteGroup& grp, std::string_view comma_separated);

std::string immersion_to_json(const LabeledGraph& host, const LabeledGraph& pattern, const Immersion& im);
Immersion parse_immersion(const LabeledGraph& host, const LabeledGraph& pattern, std::string_view text);

std::string search_result_to_json(const LabeledGraph& host, const LabeledGraph& pattern,
                                  const ImmersionSearchResult& r);

std::string pack_or_cover_to_json(const LabeledGraph& g, Vertex x, const Subgroup& sub, int r,
                                  const PackOrCover& p);

std::string partition_to_json(const LabeledGraph& g, std::string_view key, const std::vector<VertexSet>& parts,
                              std::optional<int> t = {});

std::string set_value_to_json(const LabeledGraph& g, const SetValue& v);

std::string decomposition_to_json(const LabeledGraph& g, const DecomposeResult& d);

struct ParsedDecomposition {
    ShiftAssignment shift;
    TreeCutDecomposition tree;
    std::optional<int> t;
    std::optional<int> outcome_bound;
};

ParsedDecomposition parse_decomposition(const LabeledGraph& g, std::string_view text);

std::string structure_report_to_json(const LabeledGraph& g, const StructureReport& r, int t, int n);

}  // namespace gammaforge::io
