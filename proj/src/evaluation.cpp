#include "ilscsl/evaluation.hpp"

#include <cmath>
#include <cstdio>

#include "ilscsl/errors.hpp"

namespace ilscsl {

namespace {

struct PairCounts {
    int correct = 0, reversed = 0, missing = 0, extra = 0;
};

PairCounts count_pairs(const Dag& g, const Dag& truth) {
    if (g.n() != truth.n())
        throw InputError("structure metrics: graphs are over different variable counts");
    PairCounts c;
    const int n = truth.n();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool tf = truth.has_edge(i, j), tr = truth.has_edge(j, i);
            const bool gf = g.has_edge(i, j), gr = g.has_edge(j, i);
            if (tf || tr) {
                if (gf == tf && gr == tr)
                    ++c.correct;
                else if (gf || gr)
                    ++c.reversed;
                else
                    ++c.missing;
            } else if (gf || gr) {
                ++c.extra;
            }
        }
    }
    return c;
}

}  // namespace

MetricsSnapshot compute_metrics(const Dag& g, const Dag& truth) {
    if (truth.edge_count() == 0) throw InputError("compute_metrics: truth DAG has no edges");
    const PairCounts c = count_pairs(g, truth);
    MetricsSnapshot m;
    m.correct = c.correct;
    m.reversed = c.reversed;
    m.missing = c.missing;
    m.extra = c.extra;
    m.shd = c.reversed + c.missing + c.extra;
    m.scaled_shd = static_cast<double>(m.shd) / truth.edge_count();
    m.tpr = static_cast<double>(m.correct) / truth.edge_count();
    return m;
}

int shd(const Dag& g, const Dag& truth) {
    const PairCounts c = count_pairs(g, truth);
    return c.reversed + c.missing + c.extra;
}

double scaled_shd(const Dag& g, const Dag& truth) {
    return compute_metrics(g, truth).scaled_shd;
}

double tpr(const Dag& g, const Dag& truth) { return compute_metrics(g, truth).tpr; }

void StructuralParams::validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (double v : {gamma1, z1, z2, z3, p_r_given_e})
        if (!in01(v)) throw InputError("StructuralParams: fractions must lie in [0,1]");
    if (gamma2 < 0.0) throw InputError("StructuralParams: gamma2 must be nonnegative");
    if (std::abs(z1 + z2 + z3 - 1.0) > 1e-9)
        throw InputError("StructuralParams: z1 + z2 + z3 must equal 1");
}

StructuralParams structural_params(const Dag& g, const Dag& truth) {
    if (g.n() != truth.n())
        throw InputError("structural_params: graphs are over different variable counts");
    const int n = truth.n();
    if (n < 2) throw InputError("structural_params: need at least two variables");
    const auto edges = g.edges();
    if (edges.empty()) throw InputError("structural_params: learned DAG has no edges");

    StructuralParams s;
    int unlinked_pairs = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!truth.reachable(i, j) && !truth.reachable(j, i)) ++unlinked_pairs;
    s.gamma1 = static_cast<double>(unlinked_pairs) / (n * (n - 1) / 2);
    s.gamma2 = static_cast<double>(edges.size()) / n;

    int correct = 0, reversed = 0, extra = 0, extra_reverse_path = 0;
    for (const auto& [i, j] : edges) {
        if (truth.has_edge(i, j)) {
            ++correct;
        } else if (truth.has_edge(j, i)) {
            ++reversed;
        } else {
            ++extra;
            if (truth.reachable(j, i)) ++extra_reverse_path;
        }
    }
    const double e = static_cast<double>(edges.size());
    s.z1 = correct / e;
    s.z2 = reversed / e;
    s.z3 = extra / e;
    if (extra > 0) s.p_r_given_e = static_cast<double>(extra_reverse_path) / extra;
    return s;
}

StructuralParams default_structural_params() {
    StructuralParams s;
    s.gamma1 = 0.51;
    s.gamma2 = 1.09;
    s.z1 = 0.88;
    s.z2 = 0.05;
    s.z3 = 0.07;
    s.p_r_given_e = 0.05;
    return s;
}

void ErrorRates::validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (double v : {p_e, p_r, p_r_d, p_m_d, p_c})
        if (!in01(v)) throw InputError("ErrorRates: rates must lie in [0,1]");
}

ErrorEstimate estimate_error_counts(int n, const StructuralParams& sp, const ErrorRates& er) {
    if (n < 2) throw InputError("estimate_error_counts: need at least two variables");
    sp.validate();
    er.validate();
    ErrorEstimate e;
    const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
    e.e_full = (er.p_e * sp.gamma1 + er.p_r * (1.0 - sp.gamma1)) * pairs;
    e.e_ours_upper = ((er.p_r_d + er.p_m_d) * sp.z1 + er.p_m_d * sp.z2 +
                      (er.p_r + er.p_c * sp.p_r_given_e) * sp.z3) *
                     sp.gamma2 * n;
    e.ratio = e.e_full > 0.0 ? e.e_ours_upper / e.e_full : 0.0;
    return e;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / values.size();
    if (values.size() < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (values.size() - 1));
    return s;
}

std::string format_mean_std(const Summary& s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f +/- %.3f", s.mean, s.stddev);
    return buf;
}

}  // namespace ilscsl
