#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ilscsl/constraints.hpp"
#include "ilscsl/dag.hpp"
#include "ilscsl/errors.hpp"
#include "ilscsl/oracle.hpp"
#include "ilscsl/search.hpp"

namespace ilscsl {

// Constraints implied by a verdict on the learned edge (i, j).
// B: the edge is backwards, so j -> i becomes required. C: the pair is
// unrelated, so both directions become forbidden. A confirms and D abstains;
// neither adds anything.
std::vector<EdgeConstraint> constraint_from_verdict(const Edge& edge, char verdict);

enum class Termination {
    Fixpoint,               // an audit added no new constraint
    MaxIters,               // iteration budget exhausted
    InfeasibleConstraints,  // accumulated constraints admit no DAG for the search
};

// Naming context for oracle queries: everything a prompt needs that the
// dataset itself does not carry.
struct SupervisionMeta {
    std::string dataset_name;
    std::string field_text;  // expert domain named in the prompt
    std::vector<std::string> names;
    std::vector<std::string> descriptions;  // empty entries fall back to names

    std::string description(int i) const;
    void validate(int n) const;
};

struct SupervisionConfig {
    int max_iters = 10;  // learn passes, each followed by an audit
    SearchMethod method = SearchMethod::HillClimb;
    ConstraintMode mode = ConstraintMode::Hard;
    SearchConfig search;

    void validate() const;
};

struct AuditEntry {
    Edge edge;  // learned edge the question was about
    char verdict = 'D';
    VerdictSource source = VerdictSource::Cache;
};

struct IterationRecord {
    Dag dag;
    double score = 0.0;
    std::vector<AuditEntry> audits;  // pairs not judged in any earlier iteration
    std::vector<EdgeConstraint> new_constraints;
};

// Full history of one supervised run. The final structure is the last
// learned DAG; under Fixpoint the last audit confirmed it adds nothing.
struct RunTrace {
    explicit RunTrace(int n) : constraints(n) {}

    std::vector<IterationRecord> iterations;
    ConstraintSet constraints;  // accumulated over every audit
    Termination terminated_by = Termination::Fixpoint;

    const Dag& final_dag() const;  // throws InputError when no iteration completed
};

// Raised when the oracle fails mid-run; the iterations finished so far (plus
// the partially audited one) survive in the carried trace.
class SupervisionAborted : public OracleError {
public:
    SupervisionAborted(const std::string& msg, RunTrace partial)
        : OracleError(msg), partial_(std::make_shared<RunTrace>(std::move(partial))) {}

    const RunTrace& partial() const { return *partial_; }

private:
    std::shared_ptr<RunTrace> partial_;
};

// The supervised learning loop: learn a DAG under the current constraints,
// ask the oracle about each learned edge whose pair is still unjudged, fold
// the verdicts into the constraint set, and repeat until an audit adds
// nothing, the iteration budget runs out, or the constraints become
// infeasible for the search. Pairs are judged once, unordered, for the whole
// run. An infeasible first learn propagates InfeasibleError; an infeasible
// later learn ends the run with the last feasible DAG as final.
RunTrace run_ils_csl(const ScoreEngine& engine, const SupervisionMeta& meta, Oracle& oracle,
                     const SupervisionConfig& cfg, const ConstraintSet* initial = nullptr);

}  // namespace ilscsl
