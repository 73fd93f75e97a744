#include "ilscsl/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "ilscsl/errors.hpp"
#include "ilscsl/util.hpp"

namespace ilscsl {

void ScoreConfig::validate() const {
    if (ess <= 0.0) throw InputError("ScoreConfig: ess must be > 0");
    if (!(prior_prob > 0.5 && prior_prob < 1.0))
        throw InputError("ScoreConfig: prior_prob must lie in (0.5, 1)");
    if (max_parents && *max_parents < 0)
        throw InputError("ScoreConfig: max_parents must be >= 0");
}

std::size_t LocalScoreKeyHash::operator()(const LocalScoreKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    feed(static_cast<std::uint64_t>(k.child));
    for (int p : k.parents) feed(static_cast<std::uint64_t>(p) + 0x9e37ULL);
    return static_cast<std::size_t>(h);
}

double local_score(const DiscreteDataset& d, const LocalScoreKey& key, const ScoreConfig& cfg) {
    cfg.validate();
    if (d.m() < 1) throw InputError("local_score: empty dataset");
    const CountTable table = counts(d, key.child, key.parents);
    const double q = static_cast<double>(table.config_count());
    const int r = table.child_card();

    if (cfg.kind == ScoreKind::BDeu) {
        const double alpha_j = cfg.ess / q;
        const double alpha_jk = cfg.ess / (q * r);
        double score = 0.0;
        table.for_each_nonzero([&](std::int64_t, const std::vector<std::uint32_t>& row) {
            std::int64_t n_j = 0;
            for (int k = 0; k < r; ++k) {
                const std::uint32_t n_jk = row[k];
                n_j += n_jk;
                if (n_jk != 0)
                    score += std::lgamma(alpha_jk + n_jk) - std::lgamma(alpha_jk);
            }
            score += std::lgamma(alpha_j) - std::lgamma(alpha_j + static_cast<double>(n_j));
        });
        return score;
    }

    // BIC
    double loglik = 0.0;
    table.for_each_nonzero([&](std::int64_t, const std::vector<std::uint32_t>& row) {
        std::int64_t n_j = 0;
        for (int k = 0; k < r; ++k) n_j += row[k];
        for (int k = 0; k < r; ++k) {
            const std::uint32_t n_jk = row[k];
            if (n_jk != 0)
                loglik += n_jk * std::log(static_cast<double>(n_jk) / static_cast<double>(n_j));
        }
    });
    const double penalty = 0.5 * std::log(static_cast<double>(d.m())) * q * (r - 1);
    return loglik - penalty;
}

double bonus_score(const LocalScoreKey& key, const ConstraintSet& cs, const ScoreConfig& cfg) {
    cfg.validate();
    const double lp = std::log(cfg.prior_prob);
    const double lq = std::log(1.0 - cfg.prior_prob);
    auto present = [&key](int var) {
        return std::binary_search(key.parents.begin(), key.parents.end(), var);
    };
    double bonus = 0.0;
    for (const auto& [from, to] : cs.required())
        if (to == key.child) bonus += present(from) ? lp : lq;
    for (const auto& [from, to] : cs.forbidden())
        if (to == key.child) bonus += present(from) ? lq : lp;
    return bonus;
}

ScoreEngine::ScoreEngine(const DiscreteDataset& d, const ScoreConfig& cfg) : d_(d), cfg_(cfg) {
    cfg_.validate();
    if (d_.m() < 1) throw InputError("ScoreEngine: empty dataset");
}

double ScoreEngine::local(int child, const std::vector<int>& parents) const {
    return local(LocalScoreKey{child, parents});
}

double ScoreEngine::local(const LocalScoreKey& raw) const {
    LocalScoreKey key = raw;
    std::sort(key.parents.begin(), key.parents.end());
    {
        std::shared_lock lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const double value = local_score(d_, key, cfg_);
    std::unique_lock lock(mutex_);
    return cache_.emplace(std::move(key), value).first->second;
}

double ScoreEngine::total(const Dag& g, const ConstraintSet& cs, bool with_bonus) const {
    if (g.n() != d_.n()) throw InputError("ScoreEngine::total: node count mismatch");
    double sum = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const LocalScoreKey key{i, g.parents(i)};
        sum += local(key);
        if (with_bonus) sum += bonus_score(key, cs, cfg_);
    }
    return sum;
}

std::size_t ScoreEngine::cache_size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
}

double total_score(const DiscreteDataset& d, const Dag& g, const ConstraintSet& cs,
                   const ScoreConfig& cfg, bool with_bonus) {
    if (g.n() != d.n()) throw InputError("total_score: node count mismatch");
    double sum = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const LocalScoreKey key{i, g.parents(i)};
        sum += local_score(d, key, cfg);
        if (with_bonus) sum += bonus_score(key, cs, cfg);
    }
    return sum;
}

}  // namespace ilscsl
