#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ilscsl/constraints.hpp"
#include "ilscsl/dag.hpp"
#include "ilscsl/scoring.hpp"

namespace ilscsl {

enum class SearchMethod { HillClimb, OrderingSearch, Exhaustive };

// Hard mode structurally restricts the search to DAGs satisfying the
// constraint set; soft mode searches freely and lets the bonus term steer.
enum class ConstraintMode { Hard, Soft };

struct SearchConfig {
    int restarts = 20;
    // Consecutive improvement-free sweeps before an ordering-search restart
    // gives up. Hill climbing stops at its first local optimum regardless.
    int max_iters_without_improvement = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

// Greedy local search over DAGs with add / delete / reverse operators.
// Restart 0 starts from the required edges alone (hard) or the empty graph
// (soft); later restarts start from random feasible DAGs. Ties among
// equal-gain operators resolve by kind (add, delete, reverse) then smallest
// (parent, child). Deterministic for a fixed seed. Parent-set cap: the score
// config's max_parents when set, otherwise unbounded.
Dag hill_climb(const ScoreEngine& engine, const ConstraintSet& cs, ConstraintMode mode,
               const SearchConfig& scfg);

// Local search over variable orderings with insertion moves, first
// improvement per sweep, sweep order shuffled from the seed, restarts from
// random feasible orderings. Each ordering is scored by giving every node the
// best-scoring parent set among its predecessors. Parent-set cap: max_parents
// when set, otherwise 4.
Dag ordering_search(const ScoreEngine& engine, const ConstraintSet& cs, ConstraintMode mode,
                    const SearchConfig& scfg);

// Global optimum by enumerating every ordering (n <= 7). Ties resolve to the
// fewest edges, then the lexicographically smallest edge list; scores within
// 1e-9 relative count as tied. Parent-set cap: max_parents when set,
// otherwise unbounded.
Dag exhaustive_search(const ScoreEngine& engine, const ConstraintSet& cs, ConstraintMode mode);

// The best DAG consistent with one fixed ordering, and its objective value.
// Throws InfeasibleError if a required parent follows its child in the order.
std::pair<Dag, double> best_dag_for_ordering(const ScoreEngine& engine, const ConstraintSet& cs,
                                             ConstraintMode mode, const std::vector<int>& order);

// Dispatch by method; Exhaustive ignores scfg.
Dag run_search(SearchMethod method, const ScoreEngine& engine, const ConstraintSet& cs,
               ConstraintMode mode, const SearchConfig& scfg);

}  // namespace ilscsl
