#include "ilscsl/supervision.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "ilscsl/util.hpp"

namespace ilscsl {

std::vector<EdgeConstraint> constraint_from_verdict(const Edge& edge, char verdict) {
    const auto [i, j] = edge;
    switch (verdict) {
        case 'B':
            return {{j, i, Polarity::Required}};
        case 'C':
            return {{i, j, Polarity::Forbidden}, {j, i, Polarity::Forbidden}};
        case 'A':
        case 'D':
            return {};
        default:
            throw InputError(std::string("constraint_from_verdict: bad verdict '") + verdict +
                             "'");
    }
}

std::string SupervisionMeta::description(int i) const {
    if (i < 0 || i >= static_cast<int>(names.size()))
        throw InputError("SupervisionMeta: variable index out of range");
    if (i < static_cast<int>(descriptions.size()) && !descriptions[i].empty())
        return descriptions[i];
    return names[i];
}

void SupervisionMeta::validate(int n) const {
    if (static_cast<int>(names.size()) != n)
        throw InputError("SupervisionMeta: name count does not match variable count");
    if (!descriptions.empty() && static_cast<int>(descriptions.size()) != n)
        throw InputError("SupervisionMeta: description count does not match variable count");
    for (const auto& name : names)
        if (name.empty()) throw InputError("SupervisionMeta: empty variable name");
}

void SupervisionConfig::validate() const {
    if (max_iters < 1) throw InputError("SupervisionConfig: max_iters must be >= 1");
    search.validate();
}

const Dag& RunTrace::final_dag() const {
    if (iterations.empty()) throw InputError("RunTrace: no iteration completed");
    return iterations.back().dag;
}

RunTrace run_ils_csl(const ScoreEngine& engine, const SupervisionMeta& meta, Oracle& oracle,
                     const SupervisionConfig& cfg, const ConstraintSet* initial) {
    cfg.validate();
    const int n = engine.dataset().n();
    meta.validate(n);
    if (initial && initial->n() != n)
        throw InputError("run_ils_csl: constraint set sized for a different variable count");

    RunTrace trace(n);
    if (initial) trace.constraints = *initial;
    std::set<std::pair<int, int>> judged;  // unordered pairs, stored (min, max)

    trace.terminated_by = Termination::MaxIters;
    for (int k = 0; k < cfg.max_iters; ++k) {
        SearchConfig scfg = cfg.search;
        scfg.seed = derive_seed(cfg.search.seed, static_cast<std::uint64_t>(k));

        Dag dag(n);
        try {
            dag = run_search(cfg.method, engine, trace.constraints, cfg.mode, scfg);
        } catch (const InfeasibleError&) {
            if (trace.iterations.empty()) throw;
            trace.terminated_by = Termination::InfeasibleConstraints;
            return trace;
        }

        IterationRecord rec{dag, engine.total(dag, trace.constraints,
                                              cfg.mode == ConstraintMode::Soft),
                            {}, {}};

        for (const auto& [i, j] : dag.edges()) {
            if (!judged.insert({std::min(i, j), std::max(i, j)}).second) continue;

            OracleQuery q;
            q.dataset = meta.dataset_name;
            q.i = i;
            q.j = j;
            q.name_i = meta.names[i];
            q.name_j = meta.names[j];
            q.prompt = build_prompt(meta.field_text, meta.names[i], meta.description(i),
                                    meta.names[j], meta.description(j));

            OracleVerdict v;
            try {
                v = oracle.query(q);
            } catch (const OracleError& e) {
                trace.iterations.push_back(std::move(rec));
                throw SupervisionAborted(e.what(), std::move(trace));
            }
            rec.audits.push_back({{i, j}, v.value, v.source});

            for (const auto& c : constraint_from_verdict({i, j}, v.value)) {
                const auto outcome =
                    trace.constraints.add(c, Provenance{k, v.value, {i, j}});
                if (outcome.result == AddResult::Added) rec.new_constraints.push_back(c);
            }
        }

        const bool fixpoint = rec.new_constraints.empty();
        trace.iterations.push_back(std::move(rec));
        if (fixpoint) {
            trace.terminated_by = Termination::Fixpoint;
            break;
        }
    }
    return trace;
}

}  // namespace ilscsl
