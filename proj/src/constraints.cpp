#include "ilscsl/constraints.hpp"

#include <algorithm>
#include <sstream>

#include "ilscsl/errors.hpp"
#include "ilscsl/util.hpp"

namespace ilscsl {

ConstraintSet::ConstraintSet(int n) : n_(n) {
    if (n < 1) throw InputError("ConstraintSet: n must be >= 1");
}

void ConstraintSet::check_edge(int from, int to) const {
    if (from < 0 || from >= n_ || to < 0 || to >= n_)
        throw InputError("ConstraintSet: node index out of range");
    if (from == to) throw InputError("ConstraintSet: self loop");
}

AddOutcome ConstraintSet::add(const EdgeConstraint& c, const Provenance& prov) {
    check_edge(c.from, c.to);
    const Edge e{c.from, c.to};
    const Edge rev{c.to, c.from};

    if (c.polarity == Polarity::Required) {
        if (required_.count(e)) return {AddResult::Duplicate, {}};
        if (forbidden_.count(e))
            return {AddResult::Conflict, "edge already forbidden"};
        if (required_.count(rev))
            return {AddResult::Conflict, "reverse edge already required (two-cycle)"};
        // Longer cycles through the required relation are rejected too.
        std::vector<Edge> req(required_.begin(), required_.end());
        req.push_back(e);
        if (!is_acyclic(n_, req))
            return {AddResult::Conflict, "required edges would form a cycle"};
        required_.insert(e);
    } else {
        if (forbidden_.count(e)) return {AddResult::Duplicate, {}};
        if (required_.count(e))
            return {AddResult::Conflict, "edge already required"};
        forbidden_.insert(e);
    }
    log_.emplace_back(c, prov);
    return {AddResult::Added, {}};
}

std::optional<Provenance> ConstraintSet::provenance(const EdgeConstraint& c) const {
    for (const auto& [stored, prov] : log_)
        if (stored == c) return prov;
    return std::nullopt;
}

bool ParentBounds::candidate(int node, int var) const {
    const auto& c = candidates[node];
    return std::binary_search(c.begin(), c.end(), var);
}

bool ParentBounds::required(int node, int var) const {
    const auto& k = must_include[node];
    return std::binary_search(k.begin(), k.end(), var);
}

ParentBounds derive_parent_bounds(const ConstraintSet& cs) {
    const int n = cs.n();
    ParentBounds b;
    b.candidates.resize(n);
    b.must_include.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            if (!cs.is_forbidden(j, i)) b.candidates[i].push_back(j);
            if (cs.is_required(j, i)) b.must_include[i].push_back(j);
        }
        for (int k : b.must_include[i])
            if (!b.candidate(i, k))
                throw ConsistencyError("parent bounds: required parent " + std::to_string(k) +
                                       " of " + std::to_string(i) + " is not a candidate");
    }
    return b;
}

ParentBounds unconstrained_bounds(int n) {
    ParentBounds b;
    b.candidates.resize(n);
    b.must_include.resize(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i) b.candidates[i].push_back(j);
    return b;
}

std::vector<std::vector<int>> enumerate_local_space(int node, const ParentBounds& bounds,
                                                    int max_size) {
    if (node < 0 || node >= static_cast<int>(bounds.candidates.size()))
        throw InputError("enumerate_local_space: node out of range");
    return enumerate_parent_sets(bounds.must_include[node], bounds.candidates[node], max_size);
}

std::vector<std::vector<int>> enumerate_parent_sets(const std::vector<int>& must_include,
                                                    const std::vector<int>& candidates,
                                                    int max_size) {
    if (max_size < 0) throw InputError("enumerate_parent_sets: max_size must be >= 0");
    const auto& k = must_include;
    if (static_cast<int>(k.size()) > max_size)
        throw InfeasibleError("parent set needs " + std::to_string(k.size()) +
                              " required members but the parent cap is " +
                              std::to_string(max_size));
    std::vector<int> free;
    for (int c : candidates)
        if (!std::binary_search(k.begin(), k.end(), c)) free.push_back(c);

    std::vector<std::vector<int>> out;
    const int max_extra = std::min<int>(max_size - static_cast<int>(k.size()),
                                        static_cast<int>(free.size()));
    std::vector<int> pick;
    // Combinations of `free` by ascending position are lexicographic already.
    auto emit = [&]() {
        std::vector<int> p;
        p.reserve(k.size() + pick.size());
        std::merge(k.begin(), k.end(), pick.begin(), pick.end(), std::back_inserter(p));
        out.push_back(std::move(p));
    };
    auto rec = [&](auto&& self, int start, int remaining) -> void {
        if (remaining == 0) {
            emit();
            return;
        }
        for (int t = start; t <= static_cast<int>(free.size()) - remaining; ++t) {
            pick.push_back(free[t]);
            self(self, t + 1, remaining - 1);
            pick.pop_back();
        }
    };
    for (int extra = 0; extra <= max_extra; ++extra) rec(rec, 0, extra);

    // Merging K into each combination preserves size order; guarantee the
    // within-size lexicographic contract outright.
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

bool satisfies(const Dag& g, const ConstraintSet& cs) {
    if (g.n() != cs.n()) throw InputError("satisfies: node count mismatch");
    for (const auto& [from, to] : cs.required())
        if (!g.has_edge(from, to)) return false;
    for (const auto& [from, to] : cs.forbidden())
        if (g.has_edge(from, to)) return false;
    return true;
}

std::string to_text(const ConstraintSet& cs) {
    std::ostringstream out;
    out << "# constraint set over " << cs.n() << " variables\n";
    auto annotate = [&](const EdgeConstraint& c) {
        if (auto prov = cs.provenance(c); prov && prov->verdict != '?')
            out << "  # iteration " << prov->iteration << ", verdict " << prov->verdict
                << " on (" << prov->queried_edge.first << "," << prov->queried_edge.second
                << ")";
        out << '\n';
    };
    for (const auto& [from, to] : cs.required()) {
        out << "REQ " << from << ' ' << to;
        annotate({from, to, Polarity::Required});
    }
    for (const auto& [from, to] : cs.forbidden()) {
        out << "FORBID " << from << ' ' << to;
        annotate({from, to, Polarity::Forbidden});
    }
    return out.str();
}

ConstraintSet constraint_set_from_text(int n, const std::string& text) {
    ConstraintSet cs(n);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        int from = -1, to = -1;
        if (!(ls >> from >> to) || !(ls >> std::ws).eof())
            throw ParseError("expected '" + kw + " from to'", lineno);
        Polarity pol;
        if (kw == "REQ")
            pol = Polarity::Required;
        else if (kw == "FORBID")
            pol = Polarity::Forbidden;
        else
            throw ParseError("unknown keyword '" + kw + "'", lineno);
        const auto outcome = cs.add({from, to, pol});
        if (outcome.result == AddResult::Conflict)
            throw ParseError("inconsistent constraint: " + outcome.reason, lineno);
    }
    return cs;
}

}  // namespace ilscsl
