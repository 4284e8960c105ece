#include "gammaforge/group.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "gammaforge/error.hpp"

namespace gammaforge {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::NotGenerating: return "not-generating";
    case ErrorCode::InvalidTransition: return "invalid-transition";
    case ErrorCode::Precondition: return "precondition-violated";
    case ErrorCode::MalformedImmersion: return "malformed-immersion";
    case ErrorCode::InvalidCertificate: return "invalid-certificate";
    case ErrorCode::NoProperSubgroup: return "no-proper-subgroup";
    case ErrorCode::BudgetExceeded: return "budget-exceeded";
    case ErrorCode::Parse: return "parse-error";
    case ErrorCode::Structural: return "structural-error";
    case ErrorCode::Internal: return "internal-error";
    }
    return "unknown";
}

FiniteGroup FiniteGroup::from_table(std::vector<std::vector<Element>> table, std::string name) {
    const int n = static_cast<int>(table.size());
    require(n >= 1, ErrorCode::InvalidParameter, "group table is empty");
    FiniteGroup g;
    g.order_ = n;
    g.name_ = std::move(name);
    g.table_.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : table) {
        require(static_cast<int>(row.size()) == n, ErrorCode::InvalidParameter,
                "group table is not square");
        for (Element x : row) {
            require(x >= 0 && x < n, ErrorCode::InvalidParameter,
                    "group table entry out of range: " + std::to_string(x));
            g.table_.push_back(x);
        }
    }

    int identity = -1;
    for (Element e = 0; e < n && identity < 0; ++e) {
        bool ok = true;
        for (Element a = 0; a < n && ok; ++a) ok = g.mul(e, a) == a && g.mul(a, e) == a;
        if (ok) identity = e;
    }
    require(identity >= 0, ErrorCode::InvalidParameter, "group table has no identity");
    g.identity_ = identity;

    g.inverse_.assign(n, -1);
    for (Element a = 0; a < n; ++a) {
        for (Element b = 0; b < n; ++b) {
            if (g.mul(a, b) == identity && g.mul(b, a) == identity) {
                g.inverse_[a] = b;
                break;
            }
        }
        require(g.inverse_[a] >= 0, ErrorCode::InvalidParameter,
                "element " + std::to_string(a) + " has no inverse");
    }

    for (Element a = 0; a < n; ++a)
        for (Element b = 0; b < n; ++b)
            for (Element c = 0; c < n; ++c)
                require(g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)), ErrorCode::InvalidParameter,
                        "group table is not associative");
    return g;
}

int FiniteGroup::element_order(Element a) const {
    int m = 1;
    for (Element x = a; x != identity_; x = mul(x, a)) ++m;
    return m;
}

std::vector<std::vector<Element>> FiniteGroup::table() const {
    std::vector<std::vector<Element>> rows(order_);
    for (int a = 0; a < order_; ++a)
        rows[a].assign(table_.begin() + a * order_, table_.begin() + (a + 1) * order_);
    return rows;
}

GroupPtr make_group(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

GroupPtr make_cyclic(int m) {
    require(m >= 1, ErrorCode::InvalidParameter, "cyclic group order must be >= 1");
    std::vector<std::vector<Element>> t(m, std::vector<Element>(m));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) t[a][b] = (a + b) % m;
    return make_group(FiniteGroup::from_table(std::move(t), "Z" + std::to_string(m)));
}

GroupPtr make_symmetric(int m) {
    require(m >= 1 && m <= 5, ErrorCode::InvalidParameter, "symmetric group degree must be in 1..5");
    std::vector<std::vector<int>> perms;
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));

    const int n = static_cast<int>(perms.size());
    // (a*b)(i) = a(b(i)): apply b first.
    std::vector<std::vector<Element>> t(n, std::vector<Element>(n));
    std::vector<int> c(m);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int i = 0; i < m; ++i) c[i] = perms[a][perms[b][i]];
            auto it = std::lower_bound(perms.begin(), perms.end(), c);
            t[a][b] = static_cast<Element>(it - perms.begin());
        }
    }
    return make_group(FiniteGroup::from_table(std::move(t), "S" + std::to_string(m)));
}

Subgroup::Subgroup(GroupPtr parent, std::vector<Element> elements)
    : parent_(std::move(parent)), elements_(std::move(elements)) {
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    member_.assign(parent_->order(), 0);
    for (Element a : elements_) {
        require(parent_->contains(a), ErrorCode::InvalidParameter, "subgroup element out of range");
        member_[a] = 1;
    }
}

Subgroup generate_subgroup(const GroupPtr& g, std::span<const Element> gens) {
    std::vector<char> in(g->order(), 0);
    std::vector<Element> elems{g->identity()};
    in[g->identity()] = 1;
    for (Element s : gens)
        require(g->contains(s), ErrorCode::InvalidParameter, "generator out of range");
    // Closure under right multiplication by generators suffices in a finite group.
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (Element s : gens) {
            Element x = g->mul(elems[i], s);
            if (!in[x]) {
                in[x] = 1;
                elems.push_back(x);
            }
        }
    }
    return Subgroup(g, std::move(elems));
}

std::vector<Subgroup> all_subgroups(const GroupPtr& g) {
    std::set<std::vector<Element>> seen;
    std::vector<Subgroup> out;
    std::deque<Subgroup> queue;
    Element e = g->identity();
    queue.push_back(generate_subgroup(g, std::span<const Element>(&e, 1)));
    seen.insert(queue.front().elements());
    while (!queue.empty()) {
        Subgroup h = std::move(queue.front());
        queue.pop_front();
        for (Element a = 0; a < g->order(); ++a) {
            if (h.contains(a)) continue;
            std::vector<Element> gens = h.elements();
            gens.push_back(a);
            Subgroup bigger = generate_subgroup(g, gens);
            if (seen.insert(bigger.elements()).second) queue.push_back(std::move(bigger));
        }
        out.push_back(std::move(h));
    }
    std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.elements() < b.elements();
    });
    return out;
}

std::vector<Subgroup> maximal_subgroups(const GroupPtr& g) {
    std::vector<Subgroup> all = all_subgroups(g);
    std::vector<Subgroup> out;
    for (const Subgroup& h : all) {
        if (!h.is_proper()) continue;
        bool maximal = true;
        for (const Subgroup& big : all) {
            if (!big.is_proper() || big.size() <= h.size()) continue;
            if (std::includes(big.elements().begin(), big.elements().end(), h.elements().begin(),
                              h.elements().end())) {
                maximal = false;
                break;
            }
        }
        if (maximal) out.push_back(h);
    }
    return out;
}

std::vector<Element> right_coset_representatives(const Subgroup& h) {
    const FiniteGroup& g = *h.parent();
    std::vector<char> covered(g.order(), 0);
    std::vector<Element> reps;
    for (Element r = 0; r < g.order(); ++r) {
        if (covered[r]) continue;
        reps.push_back(r);
        for (Element x : h.elements()) covered[g.mul(x, r)] = 1;
    }
    return reps;
}

std::vector<Element> word_over_generators(const GroupPtr& g, std::span<const Element> gens,
                                          Element target) {
    require(g->contains(target), ErrorCode::InvalidParameter, "element not in group");
    const int n = g->order();
    std::vector<int> parent(n, -1), via(n, -1);
    std::vector<char> seen(n, 0);
    std::deque<Element> queue{g->identity()};
    seen[g->identity()] = 1;
    while (!queue.empty()) {
        Element x = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < gens.size(); ++i) {
            require(g->contains(gens[i]), ErrorCode::InvalidParameter, "generator out of range");
            Element y = g->mul(x, gens[i]);
            if (seen[y]) continue;
            seen[y] = 1;
            parent[y] = x;
            via[y] = gens[i];
            queue.push_back(y);
        }
    }
    require(std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }),
            ErrorCode::NotGenerating, "generating set does not generate the group");
    std::vector<Element> word;
    for (Element x = target; x != g->identity(); x = parent[x]) word.push_back(via[x]);
    std::reverse(word.begin(), word.end());
    return word;
}

Element product(const FiniteGroup& g, std::span<const Element> word) {
    Element acc = g.identity();
    for (Element a : word) acc = g.mul(acc, a);
    return acc;
}

}  // namespace gammaforge
