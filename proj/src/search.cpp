#include "ilscsl/search.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ilscsl/errors.hpp"
#include "ilscsl/util.hpp"

namespace ilscsl {

namespace {

// Gains and score differences below this are treated as noise: they are
// either floating-point residue between score-equivalent structures or soft
// bonuses driven to zero, and acting on them would make tie-breaking
// arithmetic-dependent.
constexpr double kGainEps = 1e-9;

bool score_tied(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<int> with_parent(const std::vector<int>& parents, int p) {
    std::vector<int> out;
    out.reserve(parents.size() + 1);
    auto it = std::lower_bound(parents.begin(), parents.end(), p);
    out.insert(out.end(), parents.begin(), it);
    out.push_back(p);
    out.insert(out.end(), it, parents.end());
    return out;
}

std::vector<int> without_parent(const std::vector<int>& parents, int p) {
    std::vector<int> out;
    out.reserve(parents.size());
    for (int x : parents)
        if (x != p) out.push_back(x);
    return out;
}

// Uniform-ish random topological order of the required-edge graph: Kahn's
// algorithm picking uniformly among ready nodes. With no required edges this
// is a plain random permutation.
std::vector<int> random_feasible_order(const ConstraintSet& cs, bool respect_required,
                                       std::mt19937_64& rng) {
    const int n = cs.n();
    std::vector<std::vector<int>> children(n);
    std::vector<int> indeg(n, 0);
    if (respect_required)
        for (const auto& [p, c] : cs.required()) {
            children[p].push_back(c);
            ++indeg[c];
        }
    std::vector<int> ready;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        const std::size_t pick = static_cast<std::size_t>(rng() % ready.size());
        const int v = ready[pick];
        ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
        order.push_back(v);
        for (int c : children[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    return order;  // complete because ConstraintSet keeps required edges acyclic
}

bool order_feasible(const ConstraintSet& cs, const std::vector<int>& order) {
    std::vector<int> pos(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) pos[order[p]] = static_cast<int>(p);
    for (const auto& [from, to] : cs.required())
        if (pos[from] >= pos[to]) return false;
    return true;
}

struct SearchContext {
    const ScoreEngine& engine;
    const ConstraintSet& cs;
    bool hard;
    bool with_bonus;  // soft mode scores carry the bonus term
    ParentBounds bounds;
    int cap;

    SearchContext(const ScoreEngine& e, const ConstraintSet& c, ConstraintMode mode,
                  int default_cap)
        : engine(e), cs(c), hard(mode == ConstraintMode::Hard), with_bonus(!hard) {
        if (e.dataset().n() != c.n())
            throw InputError("search: dataset and constraint set disagree on n");
        bounds = hard ? derive_parent_bounds(cs) : unconstrained_bounds(cs.n());
        cap = e.config().max_parents.value_or(default_cap);
        if (hard)
            for (int i = 0; i < cs.n(); ++i)
                if (static_cast<int>(bounds.must_include[i].size()) > cap)
                    throw InfeasibleError(
                        "node " + std::to_string(i) + " has " +
                        std::to_string(bounds.must_include[i].size()) +
                        " required parents but the parent cap is " + std::to_string(cap));
    }

    double family(int child, const std::vector<int>& parents) const {
        const LocalScoreKey key{child, parents};
        double s = engine.local(key);
        if (with_bonus) s += bonus_score(key, cs, engine.config());
        return s;
    }
};

Dag initial_graph(const SearchContext& ctx) {
    Dag g(ctx.cs.n());
    if (ctx.hard)
        for (const auto& [p, c] : ctx.cs.required()) g.add_edge(p, c);
    return g;
}

// Random DAG consistent with the bounds, used for hill-climb restarts: a
// random feasible ordering plus a sparse random subset of admissible edges.
Dag random_feasible_dag(const SearchContext& ctx, std::mt19937_64& rng) {
    const int n = ctx.cs.n();
    const std::vector<int> order = random_feasible_order(ctx.cs, ctx.hard, rng);
    Dag g = initial_graph(ctx);
    const double p_edge = std::min(0.3, 3.0 / n);
    for (int b = 1; b < n; ++b)
        for (int a = 0; a < b; ++a) {
            const int parent = order[a];
            const int child = order[b];
            const double u = uniform01(rng);  // drawn unconditionally: stream layout is fixed
            if (u >= p_edge) continue;
            if (ctx.hard && !ctx.bounds.candidate(child, parent)) continue;
            if (static_cast<int>(g.parents(child).size()) >= ctx.cap) continue;
            g.add_edge(parent, child);
        }
    return g;
}

struct Move {
    enum Kind { Add, Delete, Reverse, None } kind = None;
    int i = -1;
    int j = -1;
    double gain = 0.0;
};

Move best_move(const SearchContext& ctx, Dag& g) {
    Move best;
    auto consider = [&best](Move::Kind kind, int i, int j, double gain) {
        if (gain <= kGainEps) return;
        // Gains within rounding of each other count as tied; the first
        // candidate in scan order wins, which is exactly the
        // kind-then-lexicographic tie rule.
        if (best.kind == Move::None || (gain > best.gain && !score_tied(gain, best.gain)))
            best = Move{kind, i, j, gain};
    };
    const int n = g.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || g.has_edge(i, j)) continue;
            if (ctx.hard && !ctx.bounds.candidate(j, i)) continue;
            if (static_cast<int>(g.parents(j).size()) >= ctx.cap) continue;
            if (g.reachable(j, i)) continue;  // would close a cycle
            const auto pa = g.parents(j);
            consider(Move::Add, i, j,
                     ctx.family(j, with_parent(pa, i)) - ctx.family(j, pa));
        }
    for (const auto& [i, j] : g.edges()) {
        if (ctx.hard && ctx.bounds.required(j, i)) continue;
        const auto pa = g.parents(j);
        consider(Move::Delete, i, j,
                 ctx.family(j, without_parent(pa, i)) - ctx.family(j, pa));
    }
    for (const auto& [i, j] : g.edges()) {
        if (ctx.hard && (ctx.bounds.required(j, i) || !ctx.bounds.candidate(i, j))) continue;
        if (static_cast<int>(g.parents(i).size()) >= ctx.cap) continue;
        // Reversing i->j is legal iff no other path i ~> j survives removal.
        g.remove_edge(i, j);
        const bool cyclic = g.reachable(i, j);
        g.add_edge(i, j);
        if (cyclic) continue;
        const auto pa_j = g.parents(j);
        const auto pa_i = g.parents(i);
        const double gain = ctx.family(j, without_parent(pa_j, i)) - ctx.family(j, pa_j) +
                            ctx.family(i, with_parent(pa_i, j)) - ctx.family(i, pa_i);
        consider(Move::Reverse, i, j, gain);
    }
    return best;
}

Dag climb_from(const SearchContext& ctx, Dag g) {
    for (;;) {
        const Move mv = best_move(ctx, g);
        if (mv.kind == Move::None) return g;
        if (mv.kind == Move::Add) {
            g.add_edge(mv.i, mv.j);
        } else if (mv.kind == Move::Delete) {
            g.remove_edge(mv.i, mv.j);
        } else {
            g.remove_edge(mv.i, mv.j);
            g.add_edge(mv.j, mv.i);
        }
    }
}

std::pair<Dag, double> ordering_optimum(const SearchContext& ctx, const std::vector<int>& order) {
    const int n = ctx.cs.n();
    if (static_cast<int>(order.size()) != n)
        throw InputError("best_dag_for_ordering: order size mismatch");
    std::vector<int> pos(n, -1);
    for (int p = 0; p < n; ++p) {
        if (order[p] < 0 || order[p] >= n || pos[order[p]] != -1)
            throw InputError("best_dag_for_ordering: order is not a permutation");
        pos[order[p]] = p;
    }

    Dag g(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k : ctx.bounds.must_include[i])
            if (pos[k] >= pos[i])
                throw InfeasibleError("required parent " + std::to_string(k) +
                                      " does not precede node " + std::to_string(i) +
                                      " in the ordering");
        std::vector<int> candidates;
        for (int c : ctx.bounds.candidates[i])
            if (pos[c] < pos[i]) candidates.push_back(c);

        bool found = false;
        double node_best = 0.0;
        std::vector<int> node_set;
        for (auto& p : enumerate_parent_sets(ctx.bounds.must_include[i], candidates, ctx.cap)) {
            const double s = ctx.family(i, p);
            // Enumeration is size-then-lex, so strictly-greater acceptance
            // makes eps-ties resolve to the smallest, lexicographically first
            // parent set.
            if (!found || s > node_best + kGainEps) {
                found = true;
                node_best = s;
                node_set = std::move(p);
            }
        }
        for (int p : node_set) g.add_edge(p, i);
        total += node_best;
    }
    return {std::move(g), total};
}

}  // namespace

void SearchConfig::validate() const {
    if (restarts < 1) throw InputError("SearchConfig: restarts must be >= 1");
    if (max_iters_without_improvement < 1)
        throw InputError("SearchConfig: max_iters_without_improvement must be >= 1");
}

Dag hill_climb(const ScoreEngine& engine, const ConstraintSet& cs, ConstraintMode mode,
               const SearchConfig& scfg) {
    scfg.validate();
    SearchContext ctx(engine, cs, mode, engine.dataset().n() - 1);

    Dag best(cs.n());
    double best_score = 0.0;
    bool have_best = false;
    for (int r = 0; r < scfg.restarts; ++r) {
        Dag start = initial_graph(ctx);
        if (r > 0) {
            std::mt19937_64 rng(derive_seed(scfg.seed, static_cast<std::uint64_t>(r)));
            start = random_feasible_dag(ctx, rng);
        }
        Dag g = climb_from(ctx, std::move(start));
        const double score = engine.total(g, cs, ctx.with_bonus);
        if (!have_best || score > best_score + kGainEps) {
            best = std::move(g);
            best_score = score;
            have_best = true;
        }
    }
    return best;
}

std::pair<Dag, double> best_dag_for_ordering(const ScoreEngine& engine, const ConstraintSet& cs,
                                             ConstraintMode mode, const std::vector<int>& order) {
    SearchContext ctx(engine, cs, mode, 4);
    return ordering_optimum(ctx, order);
}

Dag ordering_search(const ScoreEngine& engine, const ConstraintSet& cs, ConstraintMode mode,
                    const SearchConfig& scfg) {
    scfg.validate();
    SearchContext ctx(engine, cs, mode, 4);
    const int n = cs.n();

    Dag best(n);
    double best_score = 0.0;
    bool have_best = false;
    for (int r = 0; r < scfg.restarts; ++r) {
        std::mt19937_64 rng(derive_seed(scfg.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(r)));
        std::vector<int> order = random_feasible_order(cs, ctx.hard, rng);
        auto [g, score] = ordering_optimum(ctx, order);

        int idle_sweeps = 0;
        while (idle_sweeps < scfg.max_iters_without_improvement) {
            bool improved = false;
            std::vector<int> positions(n);
            for (int p = 0; p < n; ++p) positions[p] = p;
            std::shuffle(positions.begin(), positions.end(), rng);
            for (int p : positions) {
                for (int t = 0; t < n && !improved; ++t) {
                    if (t == p) continue;
                    std::vector<int> cand = order;
                    const int v = cand[p];
                    cand.erase(cand.begin() + p);
                    cand.insert(cand.begin() + t, v);
                    if (ctx.hard && !order_feasible(cs, cand)) continue;
                    auto [cg, cscore] = ordering_optimum(ctx, cand);
                    if (cscore > score + kGainEps) {
                        order = std::move(cand);
                        g = std::move(cg);
                        score = cscore;
                        improved = true;  // first improvement: restart the sweep
                    }
                }
                if (improved) break;
            }
            idle_sweeps = improved ? 0 : idle_sweeps + 1;
        }

        if (!have_best || score > best_score + kGainEps) {
            best = std::move(g);
            best_score = score;
            have_best = true;
        }
    }
    return best;
}

Dag exhaustive_search(const ScoreEngine& engine, const ConstraintSet& cs, ConstraintMode mode) {
    SearchContext ctx(engine, cs, mode, engine.dataset().n() - 1);
    const int n = cs.n();
    if (n > 7)
        throw CapacityError("exhaustive_search: n must be <= 7, got " + std::to_string(n));

    Dag best(n);
    double best_score = 0.0;
    std::vector<Edge> best_edges;
    bool have_best = false;

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    do {
        if (ctx.hard && !order_feasible(cs, order)) continue;
        auto [g, score] = ordering_optimum(ctx, order);
        if (!have_best) {
            best_score = score;
            best = std::move(g);
            best_edges = best.edges();
            have_best = true;
            continue;
        }
        if (score_tied(score, best_score)) {
            auto edges = g.edges();
            if (edges.size() < best_edges.size() ||
                (edges.size() == best_edges.size() && edges < best_edges)) {
                best = std::move(g);
                best_score = score;
                best_edges = std::move(edges);
            }
        } else if (score > best_score) {
            best = std::move(g);
            best_score = score;
            best_edges = best.edges();
        }
    } while (std::next_permutation(order.begin(), order.end()));

    if (!have_best) throw InfeasibleError("exhaustive_search: no feasible ordering");
    return best;
}

Dag run_search(SearchMethod method, const ScoreEngine& engine, const ConstraintSet& cs,
               ConstraintMode mode, const SearchConfig& scfg) {
    switch (method) {
        case SearchMethod::HillClimb:
            return hill_climb(engine, cs, mode, scfg);
        case SearchMethod::OrderingSearch:
            return ordering_search(engine, cs, mode, scfg);
        case SearchMethod::Exhaustive:
            return exhaustive_search(engine, cs, mode);
    }
    throw InputError("run_search: unknown method");
}

}  // namespace ilscsl
