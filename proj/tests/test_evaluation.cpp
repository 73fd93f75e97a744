#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ilscsl/dag.hpp"
#include "ilscsl/errors.hpp"
#include "ilscsl/evaluation.hpp"

using namespace ilscsl;

namespace {

Dag make_random_dag(int n, double density, std::mt19937_64& rng) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
    std::shuffle(pairs.begin(), pairs.end(), rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dag g(n);
    for (auto [i, j] : pairs) {
        if (u(rng) >= density) continue;
        int from = u(rng) < 0.5 ? i : j;
        int to = from == i ? j : i;
        try {
            g.add_edge(from, to);
        } catch (const ConsistencyError&) {
            g.add_edge(to, from);
        }
    }
    return g;
}

// Pair-by-pair recount with no shared code: one error per unordered pair
// whose adjacency differs, or whose shared edge points the other way.
int shd_by_pairs(const Dag& g, const Dag& truth) {
    int total = 0;
    for (int i = 0; i < g.n(); ++i) {
        for (int j = i + 1; j < g.n(); ++j) {
            bool g_any = g.has_edge(i, j) || g.has_edge(j, i);
            bool t_any = truth.has_edge(i, j) || truth.has_edge(j, i);
            if (g_any != t_any)
                ++total;
            else if (g_any && g.has_edge(i, j) != truth.has_edge(i, j))
                ++total;
        }
    }
    return total;
}

}  // namespace

TEST_CASE("pairwise comparison counts each error once") {
    Dag truth = Dag::from_edges(3, {{0, 1}, {0, 2}, {2, 1}});
    Dag g = Dag::from_edges(3, {{0, 2}, {1, 2}});

    MetricsSnapshot m = compute_metrics(g, truth);
    CHECK(m.shd == 2);
    CHECK(m.correct == 1);
    CHECK(m.reversed == 1);
    CHECK(m.missing == 1);
    CHECK(m.extra == 0);
    CHECK(m.scaled_shd == doctest::Approx(2.0 / 3.0));
    CHECK(m.tpr == doctest::Approx(1.0 / 3.0));

    Dag with_extra = Dag::from_edges(4, {{0, 1}, {2, 3}});
    Dag truth4 = Dag::from_edges(4, {{0, 1}});
    MetricsSnapshot m2 = compute_metrics(with_extra, truth4);
    CHECK(m2.shd == 1);
    CHECK(m2.correct == 1);
    CHECK(m2.extra == 1);
    CHECK(m2.tpr == doctest::Approx(1.0));
}

TEST_CASE("shd agrees with an independent pair walk") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 40; ++trial) {
        Dag a = make_random_dag(6, 0.5, rng);
        Dag b = make_random_dag(6, 0.5, rng);
        CHECK(shd(a, b) == shd_by_pairs(a, b));
        CHECK(shd(a, b) == shd(b, a));
        CHECK(shd(a, a) == 0);
    }
}

TEST_CASE("zero distance means identical edge sets") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Dag a = make_random_dag(5, 0.4, rng);
        Dag b = make_random_dag(5, 0.4, rng);
        bool same = a.edges() == b.edges();
        CHECK((shd(a, b) == 0) == same);
    }
}

TEST_CASE("scaled distance divides by the reference edge count") {
    // Truth: the 25 lexicographically first forward pairs over ten nodes.
    std::vector<Edge> edges;
    for (int i = 0; i < 10 && edges.size() < 25; ++i)
        for (int j = i + 1; j < 10 && edges.size() < 25; ++j) edges.push_back({i, j});
    Dag truth = Dag::from_edges(10, edges);

    std::vector<Edge> pruned(edges.begin(), edges.end() - 12);
    MetricsSnapshot wide = compute_metrics(Dag::from_edges(10, pruned), truth);
    CHECK(wide.shd == 12);
    CHECK(wide.scaled_shd == doctest::Approx(0.48));
    CHECK(wide.tpr == doctest::Approx(0.52));

    std::vector<Edge> close(edges.begin(), edges.end() - 3);
    MetricsSnapshot narrow = compute_metrics(Dag::from_edges(10, close), truth);
    CHECK(narrow.shd == 3);
    CHECK(narrow.scaled_shd == doctest::Approx(0.12));
}

TEST_CASE("scaled metrics need a nonempty reference") {
    Dag empty(3);
    Dag g = Dag::from_edges(3, {{0, 1}, {2, 1}});
    CHECK_THROWS_AS(compute_metrics(g, empty), InputError);
    CHECK_THROWS_AS(scaled_shd(g, empty), InputError);
    CHECK_THROWS_AS(tpr(g, empty), InputError);
    CHECK(shd(g, empty) == 2);
    CHECK(shd(empty, g) == 2);
}

TEST_CASE("structure profile of a learned graph") {
    Dag chain = Dag::from_edges(3, {{0, 1}, {1, 2}});

    StructuralParams self = structural_params(chain, chain);
    CHECK(self.gamma1 == doctest::Approx(0.0));
    CHECK(self.gamma2 == doctest::Approx(2.0 / 3.0));
    CHECK(self.z1 == doctest::Approx(1.0));
    CHECK(self.z2 == doctest::Approx(0.0));
    CHECK(self.z3 == doctest::Approx(0.0));
    CHECK(self.p_r_given_e == doctest::Approx(0.0));
    self.validate();

    Dag half = Dag::from_edges(3, {{1, 0}, {1, 2}});
    StructuralParams sp = structural_params(half, chain);
    CHECK(sp.z1 == doctest::Approx(0.5));
    CHECK(sp.z2 == doctest::Approx(0.5));
    CHECK(sp.z3 == doctest::Approx(0.0));
    CHECK(sp.gamma2 == doctest::Approx(2.0 / 3.0));

    // The learned edge sits on a pair the truth connects only by a path,
    // and that path runs against the edge.
    Dag skip = Dag::from_edges(3, {{2, 0}});
    StructuralParams back = structural_params(skip, chain);
    CHECK(back.z3 == doctest::Approx(1.0));
    CHECK(back.p_r_given_e == doctest::Approx(1.0));

    Dag lone = Dag::from_edges(3, {{0, 1}});
    StructuralParams sparse = structural_params(lone, lone);
    CHECK(sparse.gamma1 == doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS(structural_params(Dag(3), chain), InputError);
    CHECK_THROWS_AS(structural_params(chain, Dag::from_edges(4, {{0, 1}})), InputError);
}

TEST_CASE("default calibration reproduces the reported arithmetic") {
    const StructuralParams sp = default_structural_params();
    const ErrorRates er;

    for (int n : {20, 37, 48}) {
        ErrorEstimate e = estimate_error_counts(n, sp, er);
        CHECK(e.e_ours_upper == doctest::Approx(0.09376725 * n).epsilon(1e-12));
        const double pairs = n * (n - 1) / 2.0;
        CHECK(e.e_full == doctest::Approx(0.3591 * pairs).epsilon(1e-12));
        CHECK(e.ratio == doctest::Approx(e.e_ours_upper / e.e_full).epsilon(1e-12));
    }

    ErrorEstimate e37 = estimate_error_counts(37, sp, er);
    CHECK(e37.e_ours_upper == doctest::Approx(3.46938825).epsilon(1e-9));
    CHECK(e37.e_full == doctest::Approx(239.1606).epsilon(1e-9));
    CHECK(e37.ratio == doctest::Approx(0.187534500 / (0.3591 * 36)).epsilon(1e-9));
}

TEST_CASE("estimator responds linearly to each rate") {
    const StructuralParams sp = default_structural_params();
    const ErrorRates base;
    const int n = 30;
    const double pairs = n * (n - 1) / 2.0;
    const ErrorEstimate e0 = estimate_error_counts(n, sp, base);
    const double d = 0.01;

    ErrorRates r = base;
    r.p_r_d += d;
    CHECK(estimate_error_counts(n, sp, r).e_ours_upper - e0.e_ours_upper ==
          doctest::Approx(d * sp.z1 * sp.gamma2 * n).epsilon(1e-9));

    r = base;
    r.p_m_d += d;
    CHECK(estimate_error_counts(n, sp, r).e_ours_upper - e0.e_ours_upper ==
          doctest::Approx(d * (sp.z1 + sp.z2) * sp.gamma2 * n).epsilon(1e-9));

    r = base;
    r.p_r += d;
    ErrorEstimate er2 = estimate_error_counts(n, sp, r);
    CHECK(er2.e_ours_upper - e0.e_ours_upper ==
          doctest::Approx(d * sp.z3 * sp.gamma2 * n).epsilon(1e-9));
    CHECK(er2.e_full - e0.e_full == doctest::Approx(d * (1.0 - sp.gamma1) * pairs).epsilon(1e-9));

    r = base;
    r.p_c += d;
    CHECK(estimate_error_counts(n, sp, r).e_ours_upper - e0.e_ours_upper ==
          doctest::Approx(d * sp.p_r_given_e * sp.z3 * sp.gamma2 * n).epsilon(1e-9));

    r = base;
    r.p_e += d;
    ErrorEstimate ef = estimate_error_counts(n, sp, r);
    CHECK(ef.e_full - e0.e_full == doctest::Approx(d * sp.gamma1 * pairs).epsilon(1e-9));
    CHECK(ef.e_ours_upper == doctest::Approx(e0.e_ours_upper).epsilon(1e-12));
}

TEST_CASE("summaries use the sample deviation") {
    Summary s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));

    Summary one = summarize({7.25});
    CHECK(one.mean == doctest::Approx(7.25));
    CHECK(one.stddev == 0.0);

    Summary none = summarize({});
    CHECK(none.mean == 0.0);
    CHECK(none.stddev == 0.0);

    CHECK(format_mean_std({0.482, 0.113}) == "0.482 +/- 0.113");
    CHECK(format_mean_std({2.0, 0.0}) == "2.000 +/- 0.000");
    CHECK(format_mean_std(summarize({0.3, 0.6})) == "0.450 +/- 0.212");
}

TEST_CASE("estimator validates its inputs") {
    const StructuralParams sp = default_structural_params();
    const ErrorRates er;
    CHECK_THROWS_AS(estimate_error_counts(1, sp, er), InputError);

    StructuralParams bad = sp;
    bad.z1 = 0.5;
    CHECK_THROWS_AS(estimate_error_counts(10, bad, er), InputError);

    bad = sp;
    bad.gamma2 = -0.2;
    CHECK_THROWS_AS(estimate_error_counts(10, bad, er), InputError);

    bad = sp;
    bad.gamma1 = 1.4;
    CHECK_THROWS_AS(estimate_error_counts(10, bad, er), InputError);

    ErrorRates wild;
    wild.p_r = 1.2;
    CHECK_THROWS_AS(estimate_error_counts(10, sp, wild), InputError);
}
