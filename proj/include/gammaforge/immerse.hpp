#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gammaforge/lgraph.hpp"

namespace gammaforge {

/// Immersion of a pattern H into a host G.
///
/// `trails[i]` is the branch trail of the pattern edge at position i, taken
/// in that edge's stored (tail -> head) orientation; the reverse orientation
/// maps to the inverse trail. `shift` is a per-host-vertex assignment sigma
/// under which every branch trail carries its pattern edge's label.
struct Immersion {
    std::vector<Vertex> vertex_map;
    std::vector<Trail> trails;
    ShiftAssignment shift;
    /// Free-form provenance notes from the constructions that produced it.
    std::vector<std::string> audit;
};

enum class ImmersionCondition {
    Ok,
    Injectivity,
    NotATrail,
    InversePairing,
    EdgeDisjoint,
    Endpoints,
    Label,
};

const char* to_string(ImmersionCondition c) noexcept;

struct ImmersionReport {
    ImmersionCondition failed = ImmersionCondition::Ok;
    std::string detail;

    bool ok() const noexcept { return failed == ImmersionCondition::Ok; }
};

/// Checks every immersion condition and names the first one violated.
/// Throws Error{MalformedImmersion} when the immersion refers to vertices or
/// edges that do not exist.
ImmersionReport verify_immersion(const LabeledGraph& host, const LabeledGraph& pattern,
                                 const Immersion& im, bool ignore_labels = false);

Immersion identity_immersion(const LabeledGraph& g);

/// Given h -> g and i -> h, the composite i -> g (branch trails substituted
/// step by step, shifts multiplied at branch vertices).
Immersion compose(const LabeledGraph& g, const LabeledGraph& h, const Immersion& h_into_g,
                  const LabeledGraph& i, const Immersion& i_into_h);

struct SearchBudget {
    std::uint64_t max_nodes = 2'000'000;
};

enum class SearchStatus { Found, None, Unknown };
const char* to_string(SearchStatus s) noexcept;

struct ImmersionSearchResult {
    SearchStatus status = SearchStatus::Unknown;
    std::optional<Immersion> immersion;
    std::uint64_t nodes = 0;
};

/// Backtracking immersion search. `None` is a definitive answer; `Unknown`
/// means the node budget ran out first.
ImmersionSearchResult find_immersion(const LabeledGraph& host, const LabeledGraph& pattern,
                                     SearchBudget budget = {});

enum class Tri { True, False, Unknown };
const char* to_string(Tri t) noexcept;

/// Whether the host forbids the pattern as an immersion.
Tri forbids(const LabeledGraph& host, const LabeledGraph& pattern, SearchBudget budget = {});

}  // namespace gammaforge
