#include <doctest.h>

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "ilscsl/bif.hpp"
#include "ilscsl/dataset.hpp"
#include "ilscsl/errors.hpp"
#include "ilscsl/evaluation.hpp"
#include "ilscsl/oracle.hpp"
#include "ilscsl/scoring.hpp"
#include "ilscsl/search.hpp"
#include "ilscsl/supervision.hpp"

using namespace ilscsl;

namespace {

// Same verdict for every pair, counting calls.
struct FixedOracle : Oracle {
    char letter;
    int calls = 0;
    explicit FixedOracle(char v) : letter(v) {}
    OracleVerdict query(const OracleQuery&) override {
        ++calls;
        return {letter, "", VerdictSource::Truth};
    }
};

// Truthful for a fixed number of queries, then the endpoint goes away.
struct FailAfterOracle : Oracle {
    TruthOracle inner;
    int budget;
    FailAfterOracle(const GroundTruthNetwork& net, int k) : inner(net), budget(k) {}
    OracleVerdict query(const OracleQuery& q) override {
        if (budget-- <= 0) throw OracleError("endpoint unreachable");
        return inner.query(q);
    }
};

// Triangle X1 -> X2, X1 -> X3, X3 -> X2 where X2 follows the parity of its
// parents. Both of X2's pairwise margins vanish, so an unconstrained learner
// settles on the two-edge collider into X2: one reversed edge plus one
// missing edge. Only the full triangle fits once X3 -> X2 is required.
GroundTruthNetwork parity_net() {
    const double a = 0.12, s = 0.85, t = 0.15;
    Dag truth = Dag::from_edges(3, {{0, 1}, {0, 2}, {2, 1}});
    std::vector<Cpt> cpts(3);
    cpts[0].probs = {0.5, 0.5};
    cpts[1].probs = {1 - s, s, 1 - t, t, 1 - t, t, 1 - s, s};
    cpts[2].probs = {1 - a, a, a, 1 - a};
    return GroundTruthNetwork(truth, {2, 2, 2}, cpts, {"X1", "X2", "X3"},
                              {{"0", "1"}, {"0", "1"}, {"0", "1"}});
}

GroundTruthNetwork fork_net() {
    Dag truth = Dag::from_edges(3, {{0, 1}, {0, 2}});
    std::vector<Cpt> cpts(3);
    cpts[0].probs = {0.5, 0.5};
    cpts[1].probs = {0.9, 0.1, 0.1, 0.9};
    cpts[2].probs = {0.9, 0.1, 0.1, 0.9};
    return GroundTruthNetwork(truth, {2, 2, 2}, cpts, {"A", "B", "C"},
                              {{"0", "1"}, {"0", "1"}, {"0", "1"}});
}

struct ParityRun {
    GroundTruthNetwork net = parity_net();
    DiscreteDataset data;
    ScoreConfig score;
    SupervisionMeta meta;
    SupervisionConfig cfg;

    ParityRun() : data(forward_sample(net, 1000, 1)) {
        score.kind = ScoreKind::BIC;
        meta = {"parity", "causal modeling", net.names(), {}};
        cfg.search.restarts = 1;
    }
};

}  // namespace

TEST_CASE("verdicts map to edge constraints") {
    const Edge e{1, 2};
    CHECK(constraint_from_verdict(e, 'B') ==
          std::vector<EdgeConstraint>{{2, 1, Polarity::Required}});
    CHECK(constraint_from_verdict(e, 'C') ==
          std::vector<EdgeConstraint>{{1, 2, Polarity::Forbidden}, {2, 1, Polarity::Forbidden}});
    CHECK(constraint_from_verdict(e, 'A').empty());
    CHECK(constraint_from_verdict(e, 'D').empty());
    CHECK_THROWS_AS(constraint_from_verdict(e, 'E'), InputError);
    CHECK_THROWS_AS(constraint_from_verdict(e, 'a'), InputError);
}

TEST_CASE("supervision corrects a reversed and a missing edge") {
    ParityRun f;
    ScoreEngine engine(f.data, f.score);

    ConstraintSet none(3);
    Dag base = hill_climb(engine, none, ConstraintMode::Hard, f.cfg.search);
    CHECK(base.edges() == std::vector<Edge>{{0, 2}, {1, 2}});
    MetricsSnapshot bm = compute_metrics(base, f.net.dag());
    CHECK(bm.shd == 2);
    CHECK(bm.reversed == 1);
    CHECK(bm.missing == 1);

    TruthOracle oracle(f.net);
    RunTrace trace = run_ils_csl(engine, f.meta, oracle, f.cfg);

    REQUIRE(trace.iterations.size() == 2);
    CHECK(trace.terminated_by == Termination::Fixpoint);

    const IterationRecord& it0 = trace.iterations[0];
    CHECK(it0.dag.edges() == base.edges());
    CHECK(it0.score == engine.total(it0.dag, none, false));
    REQUIRE(it0.audits.size() == 2);
    CHECK(it0.audits[0].edge == Edge{0, 2});
    CHECK(it0.audits[0].verdict == 'A');
    CHECK(it0.audits[1].edge == Edge{1, 2});
    CHECK(it0.audits[1].verdict == 'B');
    CHECK(it0.audits[1].source == VerdictSource::Truth);
    CHECK(it0.new_constraints == std::vector<EdgeConstraint>{{2, 1, Polarity::Required}});

    const IterationRecord& it1 = trace.iterations[1];
    CHECK(it1.dag.edges() == std::vector<Edge>{{0, 1}, {0, 2}, {2, 1}});
    REQUIRE(it1.audits.size() == 1);
    CHECK(it1.audits[0].edge == Edge{0, 1});
    CHECK(it1.audits[0].verdict == 'A');
    CHECK(it1.new_constraints.empty());

    MetricsSnapshot fm = compute_metrics(trace.final_dag(), f.net.dag());
    CHECK(fm.shd == 0);
    CHECK(fm.tpr == doctest::Approx(1.0));

    CHECK(trace.constraints.required() == std::set<Edge>{{2, 1}});
    CHECK(trace.constraints.forbidden().empty());
    auto prov = trace.constraints.provenance({2, 1, Polarity::Required});
    REQUIRE(prov.has_value());
    CHECK(prov->iteration == 0);
    CHECK(prov->verdict == 'B');
    CHECK(prov->queried_edge == Edge{1, 2});
}

TEST_CASE("abstaining oracle leaves the first learn untouched") {
    ParityRun f;
    ScoreEngine engine(f.data, f.score);
    FixedOracle oracle('D');
    RunTrace trace = run_ils_csl(engine, f.meta, oracle, f.cfg);

    REQUIRE(trace.iterations.size() == 1);
    CHECK(trace.terminated_by == Termination::Fixpoint);
    CHECK(trace.final_dag().edges() == std::vector<Edge>{{0, 2}, {1, 2}});
    CHECK(trace.constraints.size() == 0);
    CHECK(oracle.calls == 2);
    for (const auto& a : trace.iterations[0].audits) CHECK(a.verdict == 'D');
}

TEST_CASE("dismissive oracle forbids every learned pair") {
    ParityRun f;
    ScoreEngine engine(f.data, f.score);
    FixedOracle oracle('C');
    RunTrace trace = run_ils_csl(engine, f.meta, oracle, f.cfg);

    REQUIRE(trace.iterations.size() == 2);
    CHECK(trace.terminated_by == Termination::Fixpoint);
    CHECK(trace.iterations[0].new_constraints.size() == 4);
    CHECK(trace.final_dag().edges().empty());
    CHECK(trace.constraints.forbidden() ==
          std::set<Edge>{{0, 2}, {1, 2}, {2, 0}, {2, 1}});
    CHECK(trace.constraints.required().empty());
    CHECK(oracle.calls == 2);
}

TEST_CASE("pairs are judged at most once per run") {
    BifFile asia = load_bif_file(std::string(FIXTURE_DIR) + "/asia.bif");
    DiscreteDataset d = forward_sample(asia.net, 500, 3);
    ScoreConfig sc;
    ScoreEngine engine(d, sc);

    SupervisionMeta meta{"asia", "medicine", asia.net.names(), {}};
    SupervisionConfig cfg;
    cfg.search.restarts = 1;
    TruthOracle oracle(asia.net);
    RunTrace trace = run_ils_csl(engine, meta, oracle, cfg);

    CHECK(trace.iterations.size() <= 10);
    std::set<std::pair<int, int>> judged;
    std::size_t accumulated = 0;
    for (const auto& rec : trace.iterations) {
        const std::vector<Edge> edges = rec.dag.edges();
        std::set<Edge> learned(edges.begin(), edges.end());
        for (const auto& a : rec.audits) {
            CHECK(learned.count(a.edge) == 1);
            auto pair = std::minmax(a.edge.first, a.edge.second);
            CHECK(judged.insert({pair.first, pair.second}).second);
        }
        accumulated += rec.new_constraints.size();
    }
    CHECK(accumulated == trace.constraints.size());
}

TEST_CASE("oracle failure mid-audit keeps the partial trace") {
    ParityRun f;
    ScoreEngine engine(f.data, f.score);
    FailAfterOracle oracle(f.net, 1);

    try {
        run_ils_csl(engine, f.meta, oracle, f.cfg);
        FAIL("expected SupervisionAborted");
    } catch (const SupervisionAborted& e) {
        const RunTrace& partial = e.partial();
        REQUIRE(partial.iterations.size() == 1);
        CHECK(partial.iterations[0].dag.edges() == std::vector<Edge>{{0, 2}, {1, 2}});
        REQUIRE(partial.iterations[0].audits.size() == 1);
        CHECK(partial.iterations[0].audits[0].edge == Edge{0, 2});
        CHECK(partial.iterations[0].audits[0].verdict == 'A');
    }
}

TEST_CASE("constraints can accumulate into infeasibility") {
    GroundTruthNetwork net = fork_net();
    DiscreteDataset d = forward_sample(net, 500, 2);
    ScoreConfig sc;
    sc.kind = ScoreKind::BIC;
    sc.max_parents = 1;
    ScoreEngine engine(d, sc);

    SupervisionMeta meta{"fork", "toy systems", net.names(), {}};
    SupervisionConfig cfg;
    cfg.search.restarts = 1;
    FixedOracle oracle('B');
    RunTrace trace = run_ils_csl(engine, meta, oracle, cfg);

    REQUIRE(trace.iterations.size() == 1);
    CHECK(trace.terminated_by == Termination::InfeasibleConstraints);
    CHECK(trace.final_dag().edges() == std::vector<Edge>{{0, 1}, {0, 2}});
    CHECK(trace.constraints.required() == std::set<Edge>{{1, 0}, {2, 0}});
}

TEST_CASE("infeasible initial constraints propagate from the first learn") {
    GroundTruthNetwork net = fork_net();
    DiscreteDataset d = forward_sample(net, 500, 2);
    ScoreConfig sc;
    sc.kind = ScoreKind::BIC;
    sc.max_parents = 1;
    ScoreEngine engine(d, sc);

    ConstraintSet init(3);
    init.add({1, 0, Polarity::Required}, {});
    init.add({2, 0, Polarity::Required}, {});

    SupervisionMeta meta{"fork", "toy systems", net.names(), {}};
    SupervisionConfig cfg;
    cfg.search.restarts = 1;
    TruthOracle oracle(net);
    CHECK_THROWS_AS(run_ils_csl(engine, meta, oracle, cfg, &init), InfeasibleError);
}

TEST_CASE("iteration budget caps the loop") {
    ParityRun f;
    ScoreEngine engine(f.data, f.score);
    TruthOracle oracle(f.net);
    f.cfg.max_iters = 1;
    RunTrace trace = run_ils_csl(engine, f.meta, oracle, f.cfg);

    REQUIRE(trace.iterations.size() == 1);
    CHECK(trace.terminated_by == Termination::MaxIters);
    CHECK(trace.final_dag().edges() == std::vector<Edge>{{0, 2}, {1, 2}});
    CHECK(trace.constraints.required() == std::set<Edge>{{2, 1}});
}

TEST_CASE("initial constraints steer the first learn") {
    ParityRun f;
    ScoreEngine engine(f.data, f.score);

    ConstraintSet init(3);
    init.add({1, 2, Polarity::Forbidden}, {});
    init.add({2, 1, Polarity::Forbidden}, {});

    TruthOracle oracle(f.net);
    RunTrace trace = run_ils_csl(engine, f.meta, oracle, f.cfg, &init);

    REQUIRE(trace.iterations.size() == 1);
    CHECK(trace.terminated_by == Termination::Fixpoint);
    CHECK(trace.final_dag().edges() == std::vector<Edge>{{0, 2}});
    CHECK(trace.constraints.forbidden() == std::set<Edge>{{1, 2}, {2, 1}});
}

TEST_CASE("supervision rejects malformed inputs") {
    ParityRun f;
    ScoreEngine engine(f.data, f.score);
    TruthOracle oracle(f.net);

    SupervisionMeta short_names = f.meta;
    short_names.names.pop_back();
    CHECK_THROWS_AS(run_ils_csl(engine, short_names, oracle, f.cfg), InputError);

    SupervisionMeta blank = f.meta;
    blank.names[1].clear();
    CHECK_THROWS_AS(run_ils_csl(engine, blank, oracle, f.cfg), InputError);

    SupervisionConfig zero = f.cfg;
    zero.max_iters = 0;
    CHECK_THROWS_AS(run_ils_csl(engine, f.meta, oracle, zero), InputError);

    ConstraintSet wrong(5);
    CHECK_THROWS_AS(run_ils_csl(engine, f.meta, oracle, f.cfg, &wrong), InputError);

    SupervisionMeta described = f.meta;
    described.descriptions = {"a coin", "", "a relay"};
    CHECK(described.description(0) == "a coin");
    CHECK(described.description(1) == "X2");
    CHECK_THROWS_AS(described.description(7), InputError);
}
