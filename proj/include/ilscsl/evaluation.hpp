#pragma once

#include <string>
#include <vector>

#include "ilscsl/dag.hpp"

namespace ilscsl {

// Pairwise structural comparison of a learned DAG g against a reference.
// Each unordered pair counts at most one error: an edge present in exactly
// one graph, or present in both with opposite orientation. A reversal is a
// single edit.
struct MetricsSnapshot {
    int shd = 0;
    int correct = 0;   // same edge, same orientation
    int reversed = 0;  // same pair, opposite orientation
    int missing = 0;   // in truth only
    int extra = 0;     // in g only
    double scaled_shd = 0.0;  // shd over truth edge count
    double tpr = 0.0;         // correct over truth edge count
};

// Throws InputError when truth has no edges; the scaled fields need a
// nonempty reference. Plain shd below has no such requirement.
MetricsSnapshot compute_metrics(const Dag& g, const Dag& truth);

int shd(const Dag& g, const Dag& truth);
double scaled_shd(const Dag& g, const Dag& truth);
double tpr(const Dag& g, const Dag& truth);

// Structure profile of a learned DAG against the truth, in the terms the
// error estimator consumes. Connectivity fields read the truth; edge-split
// fields read the learned graph.
struct StructuralParams {
    double gamma1 = 0.0;  // unordered pairs with no directed path either way, over C(n,2)
    double gamma2 = 0.0;  // learned edges over n
    double z1 = 0.0;      // fraction of learned edges matching a truth edge
    double z2 = 0.0;      // fraction reversing a truth edge
    double z3 = 0.0;      // fraction on pairs with no truth edge
    // Among the z3 edges i -> j, the fraction with a truth path j ~> i.
    // Zero when there are no such edges.
    double p_r_given_e = 0.0;

    void validate() const;  // ranges, z fractions summing to one
};

// Throws InputError when g has no edges; the z fractions need a denominator.
StructuralParams structural_params(const Dag& g, const Dag& truth);

// Calibration averages this tool ships with as defaults.
StructuralParams default_structural_params();

// Rates at which causal questions come back wrong, by the relation of the
// queried ordered pair in the truth DAG.
struct ErrorRates {
    double p_e = 0.56;    // claimed causality on an unconnected pair
    double p_r = 0.15;    // reversed verdict on a path-connected pair
    double p_r_d = 0.03;  // reversed verdict on a direct edge
    double p_m_d = 0.05;  // no-causality verdict on a direct edge
    double p_c = 0.75;    // correct verdict on a path-connected pair

    void validate() const;
};

// Expected erroneous-constraint counts for a domain of n variables.
// Auditing every pair: e_full = (p_e g1 + p_r (1 - g1)) C(n,2).
// Auditing only learned edges, an upper bound:
// e_ours_upper = ((p_r_d + p_m_d) z1 + p_m_d z2 + (p_r + p_c p_r_given_e) z3) g2 n.
struct ErrorEstimate {
    double e_full = 0.0;
    double e_ours_upper = 0.0;
    double ratio = 0.0;  // e_ours_upper / e_full
};

ErrorEstimate estimate_error_counts(int n, const StructuralParams& sp, const ErrorRates& er);

// Mean and sample standard deviation (zero for fewer than two values).
struct Summary {
    double mean = 0.0;
    double stddev = 0.0;
};

Summary summarize(const std::vector<double>& values);

// "0.482 +/- 0.113" with three decimals, for metric tables.
std::string format_mean_std(const Summary& s);

}  // namespace ilscsl
