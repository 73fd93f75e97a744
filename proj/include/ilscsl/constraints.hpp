#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ilscsl/dag.hpp"

namespace ilscsl {

enum class Polarity { Required, Forbidden };

// One directed edge statement: Required means "from -> to must be present",
// Forbidden means "from -> to must be absent". Forbidden (i, j) says nothing
// about (j, i).
struct EdgeConstraint {
    int from;
    int to;
    Polarity polarity;

    bool operator==(const EdgeConstraint&) const = default;
};

// Where a constraint came from: which supervision round, which queried edge,
// and the verdict letter that produced it.
struct Provenance {
    int iteration = 0;
    char verdict = '?';
    Edge queried_edge{-1, -1};
};

enum class AddResult { Added, Duplicate, Conflict };

struct AddOutcome {
    AddResult result;
    std::string reason;  // set for Conflict
};

// A consistent set of edge constraints. Consistency is enforced eagerly at
// every insertion: no edge both required and forbidden, no pair required in
// both directions, and the required edges always form a DAG. The first
// accepted constraint on a pair wins; later contradicting ones are rejected
// with a reason and the set is left untouched.
class ConstraintSet {
public:
    explicit ConstraintSet(int n);

    int n() const { return n_; }

    AddOutcome add(const EdgeConstraint& c, const Provenance& prov = {});

    bool is_required(int from, int to) const { return required_.count({from, to}) > 0; }
    bool is_forbidden(int from, int to) const { return forbidden_.count({from, to}) > 0; }

    const std::set<Edge>& required() const { return required_; }
    const std::set<Edge>& forbidden() const { return forbidden_; }

    std::size_t size() const { return required_.size() + forbidden_.size(); }

    std::optional<Provenance> provenance(const EdgeConstraint& c) const;

    bool operator==(const ConstraintSet& other) const {
        return n_ == other.n_ && required_ == other.required_ && forbidden_ == other.forbidden_;
    }

private:
    void check_edge(int from, int to) const;

    int n_;
    std::set<Edge> required_;
    std::set<Edge> forbidden_;
    std::vector<std::pair<EdgeConstraint, Provenance>> log_;
};

// Hard-mode per-node bounds. For node i, candidates[i] is C(i): every
// variable that may appear in its parent set; must_include[i] is K(i): the
// variables that must. Both are ascending index lists with K(i) inside C(i).
struct ParentBounds {
    std::vector<std::vector<int>> candidates;
    std::vector<std::vector<int>> must_include;

    bool candidate(int node, int var) const;
    bool required(int node, int var) const;
};

// C(i) = all others minus forbidden parents of i; K(i) = required parents of
// i. Throws ConsistencyError if some K(i) is not inside C(i), which cannot
// happen for sets built through ConstraintSet::add.
ParentBounds derive_parent_bounds(const ConstraintSet& cs);

// Unconstrained bounds over n nodes (soft mode, plain search).
ParentBounds unconstrained_bounds(int n);

// All parent sets P with K(i) within P within C(i) and |P| <= max_size, in
// size order, lexicographic within a size. Throws InfeasibleError when
// |K(i)| exceeds max_size.
std::vector<std::vector<int>> enumerate_local_space(int node, const ParentBounds& bounds,
                                                    int max_size);

// Core enumerator behind enumerate_local_space: all supersets of must_include
// within candidates, size capped, same ordering contract. Both inputs are
// ascending lists with must_include inside candidates.
std::vector<std::vector<int>> enumerate_parent_sets(const std::vector<int>& must_include,
                                                    const std::vector<int>& candidates,
                                                    int max_size);

// True iff every required edge is present in g and no forbidden edge is.
bool satisfies(const Dag& g, const ConstraintSet& cs);

// Text form: one constraint per line, "REQ i j" or "FORBID i j", '#' starts a
// comment. Provenance is emitted as a trailing comment and ignored on read.
std::string to_text(const ConstraintSet& cs);
ConstraintSet constraint_set_from_text(int n, const std::string& text);

}  // namespace ilscsl
