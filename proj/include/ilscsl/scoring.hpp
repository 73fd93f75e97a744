#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "ilscsl/constraints.hpp"
#include "ilscsl/dag.hpp"
#include "ilscsl/dataset.hpp"

namespace ilscsl {

enum class ScoreKind { BDeu, BIC };

struct ScoreConfig {
    ScoreKind kind = ScoreKind::BDeu;
    double ess = 1.0;             // BDeu equivalent sample size
    double prior_prob = 0.99999;  // soft-constraint confidence, in (0.5, 1)
    std::optional<int> max_parents;  // parent-set cap where a search applies one

    void validate() const;
};

// Identity of one local score: child plus its parent set sorted ascending.
// The dataset and config are fixed per engine, so this is the whole cache key.
struct LocalScoreKey {
    int child;
    std::vector<int> parents;

    bool operator==(const LocalScoreKey&) const = default;
};

struct LocalScoreKeyHash {
    std::size_t operator()(const LocalScoreKey& k) const;
};

// Decomposable local score of one family, natural log throughout.
// BDeu: sum over parent configs j of lnG(a_j) - lnG(a_j + N_j)
//       + sum over child values k of lnG(a_jk + N_jk) - lnG(a_jk),
//       with a_j = ess / q and a_jk = ess / (q r).
// BIC:  sum over j,k of N_jk ln(N_jk / N_j) minus (ln m / 2) q (r - 1).
// Configurations never observed contribute nothing to the BDeu sums and the
// BIC likelihood; the BIC penalty always uses the full q.
double local_score(const DiscreteDataset& d, const LocalScoreKey& key, const ScoreConfig& cfg);

// Per-node additive adjustment for soft constraints. For each required edge
// j -> i in cs: ln(p) if j is in the parent set else ln(1-p). For each
// forbidden edge j -> i: ln(1-p) if j is present else ln(p). p = prior_prob.
double bonus_score(const LocalScoreKey& key, const ConstraintSet& cs, const ScoreConfig& cfg);

// Memoizing facade over local_score for one (dataset, config) pair. Safe for
// concurrent readers; insertions are serialized. Cached and uncached results
// are bit-identical because the cache stores the computed double unchanged.
class ScoreEngine {
public:
    ScoreEngine(const DiscreteDataset& d, const ScoreConfig& cfg);

    const DiscreteDataset& dataset() const { return d_; }
    const ScoreConfig& config() const { return cfg_; }

    double local(int child, const std::vector<int>& parents) const;
    double local(const LocalScoreKey& key) const;

    // Full objective for a DAG: the sum of local scores, plus the soft bonus
    // of every node when with_bonus is set.
    double total(const Dag& g, const ConstraintSet& cs, bool with_bonus) const;

    std::size_t cache_size() const;

private:
    const DiscreteDataset& d_;
    ScoreConfig cfg_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<LocalScoreKey, double, LocalScoreKeyHash> cache_;
};

// Uncached convenience matching ScoreEngine::total.
double total_score(const DiscreteDataset& d, const Dag& g, const ConstraintSet& cs,
                   const ScoreConfig& cfg, bool with_bonus);

}  // namespace ilscsl
