#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gammaforge {

/// Dense index of a group element, 0..order-1.
using Element = int;

/// A finite group given by its full multiplication table.
///
/// Elements are dense indices. The table is row-major with the row being the
/// left factor, so `mul(a, b) == table[a * order + b]`. Instances are
/// immutable once built; the constructors validate every group axiom
/// exhaustively.
class FiniteGroup {
public:
    /// Validates `table` (closure, identity, inverses, associativity).
    /// Throws Error{InvalidParameter} on any violation.
    static FiniteGroup from_table(std::vector<std::vector<Element>> table,
                                  std::string name = {});

    int order() const noexcept { return order_; }
    Element identity() const noexcept { return identity_; }
    const std::string& name() const noexcept { return name_; }

    Element mul(Element a, Element b) const { return table_[a * order_ + b]; }
    Element inv(Element a) const { return inverse_[a]; }
    /// a * b * a^-1
    Element conj(Element a, Element b) const { return mul(mul(a, b), inv(a)); }
    bool contains(Element a) const noexcept { return a >= 0 && a < order_; }

    /// Order of the element `a` (smallest m >= 1 with a^m = 1).
    int element_order(Element a) const;

    std::vector<std::vector<Element>> table() const;

    bool operator==(const FiniteGroup& other) const {
        return order_ == other.order_ && table_ == other.table_;
    }

private:
    FiniteGroup() = default;

    int order_ = 0;
    std::vector<Element> table_;
    Element identity_ = 0;
    std::vector<Element> inverse_;
    std::string name_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

/// Z_m under addition. Throws InvalidParameter for m < 1.
GroupPtr make_cyclic(int m);

/// S_m under composition, 1 <= m <= 5. Element 0 is the identity
/// permutation; the rest follow lexicographic order of permutations.
GroupPtr make_symmetric(int m);

GroupPtr make_group(FiniteGroup g);

class Subgroup {
public:
    /// Wraps a set already known to be closed. Use generate_subgroup() for
    /// arbitrary generating sets.
    Subgroup(GroupPtr parent, std::vector<Element> elements);

    const GroupPtr& parent() const noexcept { return parent_; }
    const std::vector<Element>& elements() const noexcept { return elements_; }
    int size() const noexcept { return static_cast<int>(elements_.size()); }
    bool contains(Element a) const { return a >= 0 && a < static_cast<int>(member_.size()) && member_[a]; }
    bool is_proper() const noexcept { return size() < parent_->order(); }

    bool operator==(const Subgroup& other) const { return elements_ == other.elements_; }
    bool operator<(const Subgroup& other) const { return elements_ < other.elements_; }

private:
    GroupPtr parent_;
    std::vector<Element> elements_;
    std::vector<char> member_;
};

/// Smallest subgroup of `g` containing `gens`.
Subgroup generate_subgroup(const GroupPtr& g, std::span<const Element> gens);

inline bool is_proper(const Subgroup& h) { return h.is_proper(); }

/// Every subgroup of `g`, sorted by decreasing order then lexicographically.
std::vector<Subgroup> all_subgroups(const GroupPtr& g);

/// Maximal proper subgroups, sorted by decreasing order then
/// lexicographically. Empty for the trivial group.
std::vector<Subgroup> maximal_subgroups(const GroupPtr& g);

/// One representative per right coset H*r, the representative being the
/// smallest element index in its coset.
std::vector<Element> right_coset_representatives(const Subgroup& h);

/// Shortest word over `gens` whose product is `target`, found by BFS on the
/// right Cayley graph. Ties go to the lowest generator (in the order given).
/// The identity gets the empty word. Throws NotGenerating if `gens` does not
/// generate the whole group.
std::vector<Element> word_over_generators(const GroupPtr& g, std::span<const Element> gens,
                                          Element target);

/// Product of a sequence of elements, left to right.
Element product(const FiniteGroup& g, std::span<const Element> word);

}  // namespace gammaforge
