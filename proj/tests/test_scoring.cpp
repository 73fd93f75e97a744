#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "ilscsl/constraints.hpp"
#include "ilscsl/dataset.hpp"
#include "ilscsl/errors.hpp"
#include "ilscsl/scoring.hpp"

using namespace ilscsl;

namespace {

// Direct transliteration of the BDeu definition, kept independent of the
// production code path: full mixed-radix sweep over every parent
// configuration, lgamma term by term.
double bdeu_reference(const DiscreteDataset& d, int child, std::vector<int> parents,
                      double ess) {
    std::sort(parents.begin(), parents.end());
    std::int64_t q = 1;
    for (int p : parents) q *= d.card(p);
    const int r = d.card(child);
    const double aj = ess / static_cast<double>(q);
    const double ajk = ess / static_cast<double>(q * r);

    double total = 0.0;
    for (std::int64_t config = 0; config < q; ++config) {
        std::vector<std::uint32_t> njk(r, 0);
        for (int row = 0; row < d.m(); ++row) {
            std::int64_t c = 0;
            for (int p : parents) c = c * d.card(p) + d.value(row, p);
            if (c == config) ++njk[d.value(row, child)];
        }
        std::int64_t nj = 0;
        for (int k = 0; k < r; ++k) nj += njk[k];
        total += std::lgamma(aj) - std::lgamma(aj + static_cast<double>(nj));
        for (int k = 0; k < r; ++k)
            total += std::lgamma(ajk + static_cast<double>(njk[k])) - std::lgamma(ajk);
    }
    return total;
}

DiscreteDataset sample_noise(int n, int m, std::uint64_t seed, int max_card = 3) {
    std::mt19937_64 rng(seed);
    std::vector<int> cards(n);
    for (int i = 0; i < n; ++i) cards[i] = 2 + static_cast<int>(rng() % (max_card - 1));
    std::vector<int> values;
    values.reserve(static_cast<std::size_t>(n) * m);
    for (int r = 0; r < m; ++r)
        for (int i = 0; i < n; ++i) values.push_back(static_cast<int>(rng() % cards[i]));
    return DiscreteDataset(std::move(cards), std::move(values));
}

}  // namespace

TEST_CASE("bic on a fair binary marginal matches the hand computation") {
    // counts (2, 2), m = 4: likelihood 4 ln(1/2), penalty (ln 4)/2 * 1 * 1.
    const DiscreteDataset d({2}, {0, 1, 0, 1});
    ScoreConfig cfg;
    cfg.kind = ScoreKind::BIC;
    const double got = local_score(d, {0, {}}, cfg);
    CHECK(got == doctest::Approx(-3.465735903).epsilon(1e-9));
    CHECK(got == doctest::Approx(4.0 * std::log(0.5) - 0.5 * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("bic penalty counts unobserved parent configurations") {
    // Child binary, parent card 3 but only values {0, 1} observed. The
    // likelihood sums over observed configs; the penalty must use q = 3.
    const DiscreteDataset d({3, 2}, {0, 0, 0, 1, 1, 0, 1, 1});
    ScoreConfig cfg;
    cfg.kind = ScoreKind::BIC;
    const double got = local_score(d, {1, {0}}, cfg);
    const double lik = 4.0 * std::log(0.5);
    const double pen = 0.5 * std::log(4.0) * 3.0 * 1.0;
    CHECK(got == doctest::Approx(lik - pen).epsilon(1e-12));
}

TEST_CASE("bdeu agrees with an independent lgamma transliteration") {
    const DiscreteDataset d = sample_noise(5, 60, 1234);
    for (double ess : {1.0, 4.0, 10.0}) {
        ScoreConfig cfg;
        cfg.kind = ScoreKind::BDeu;
        cfg.ess = ess;
        const std::vector<std::vector<int>> parent_sets = {
            {}, {0}, {1, 3}, {0, 2, 4}, {0, 1, 2, 3}};
        for (const auto& ps : parent_sets) {
            bool contains_child = false;
            for (int p : ps) contains_child = contains_child || p == 4;
            if (contains_child) continue;
            const double mine = local_score(d, {4, ps}, cfg);
            const double ref = bdeu_reference(d, 4, ps, ess);
            CHECK(mine == doctest::Approx(ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("bdeu gives markov equivalent structures equal totals") {
    const DiscreteDataset d = sample_noise(3, 80, 99);
    ScoreConfig cfg;
    cfg.kind = ScoreKind::BDeu;
    const ConstraintSet none(3);

    // x -> y versus y -> x.
    const Dag a = Dag::from_edges(3, {{0, 1}});
    const Dag b = Dag::from_edges(3, {{1, 0}});
    CHECK(total_score(d, a, none, cfg, false) ==
          doctest::Approx(total_score(d, b, none, cfg, false)).epsilon(1e-9));

    // Chain, reversed chain, and fork share a skeleton with no v-structure.
    const Dag chain = Dag::from_edges(3, {{0, 1}, {1, 2}});
    const Dag rev = Dag::from_edges(3, {{2, 1}, {1, 0}});
    const Dag fork = Dag::from_edges(3, {{1, 0}, {1, 2}});
    const double sc = total_score(d, chain, none, cfg, false);
    CHECK(sc == doctest::Approx(total_score(d, rev, none, cfg, false)).epsilon(1e-9));
    CHECK(sc == doctest::Approx(total_score(d, fork, none, cfg, false)).epsilon(1e-9));

    // The collider is a different equivalence class; with dependent-ish
    // random data its score differs.
    const Dag collider = Dag::from_edges(3, {{0, 1}, {2, 1}});
    CHECK(total_score(d, collider, none, cfg, false) != doctest::Approx(sc).epsilon(1e-12));
}

TEST_CASE("adding a constant parent strictly hurts bic") {
    // Constant column changes nothing in the likelihood but doubles the
    // penalty blocks.
    std::vector<int> values;
    std::mt19937_64 rng(5);
    for (int r = 0; r < 50; ++r) {
        values.push_back(0);
        values.push_back(static_cast<int>(rng() % 2));
    }
    const DiscreteDataset d({2, 2}, std::move(values));
    ScoreConfig cfg;
    cfg.kind = ScoreKind::BIC;
    CHECK(local_score(d, {1, {0}}, cfg) < local_score(d, {1, {}}, cfg));
}

TEST_CASE("engine cache returns bit-identical doubles and grows once per key") {
    const DiscreteDataset d = sample_noise(4, 50, 7);
    ScoreConfig cfg;
    const ScoreEngine engine(d, cfg);
    const double first = engine.local(2, {0, 3});
    const std::size_t after_first = engine.cache_size();
    const double second = engine.local(2, {3, 0});  // same key once sorted
    CHECK(engine.cache_size() == after_first);
    CHECK(std::memcmp(&first, &second, sizeof first) == 0);
    CHECK(first == local_score(d, {2, {0, 3}}, cfg));
}

TEST_CASE("total is the sum of local scores") {
    const DiscreteDataset d = sample_noise(4, 40, 21);
    ScoreConfig cfg;
    const ScoreEngine engine(d, cfg);
    const Dag g = Dag::from_edges(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    const ConstraintSet none(4);
    double manual = 0.0;
    for (int i = 0; i < 4; ++i) manual += engine.local(i, g.parents(i));
    CHECK(engine.total(g, none, false) == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("soft bonus is exact and the toggle identity holds") {
    const double p = 0.99999;
    ScoreConfig cfg;
    cfg.prior_prob = p;
    ConstraintSet cs(3);
    cs.add({0, 2, Polarity::Required});
    cs.add({1, 2, Polarity::Forbidden});

    // Parent set {0}: required satisfied, forbidden absent.
    CHECK(bonus_score({2, {0}}, cs, cfg) ==
          doctest::Approx(std::log(p) + std::log(p)).epsilon(1e-12));
    // Parent set {1}: required violated, forbidden violated.
    CHECK(bonus_score({2, {1}}, cs, cfg) ==
          doctest::Approx(2.0 * std::log(1.0 - p)).epsilon(1e-12));
    // Toggling one constraint's satisfaction moves the bonus by
    // ln p - ln(1 - p) exactly.
    const double with_req = bonus_score({2, {0}}, cs, cfg);
    const double without_req = bonus_score({2, {}}, cs, cfg);
    CHECK(with_req - without_req ==
          doctest::Approx(std::log(p) - std::log(1.0 - p)).epsilon(1e-9));
    // Nodes with no constraints get zero.
    CHECK(bonus_score({0, {}}, cs, cfg) == 0.0);
    CHECK(bonus_score({1, {0}}, cs, cfg) == 0.0);
}

TEST_CASE("soft total of a fully satisfying graph exceeds the bare total by the bonus") {
    const DiscreteDataset d = sample_noise(3, 30, 3);
    ScoreConfig cfg;
    const ScoreEngine engine(d, cfg);
    ConstraintSet cs(3);
    cs.add({0, 1, Polarity::Required});
    cs.add({2, 1, Polarity::Forbidden});
    const Dag g = Dag::from_edges(3, {{0, 1}});
    const ConstraintSet none(3);
    const double plain = engine.total(g, none, false);
    const double soft = engine.total(g, cs, true);
    CHECK(soft - plain == doctest::Approx(2.0 * std::log(cfg.prior_prob)).epsilon(1e-9));
}

TEST_CASE("score config validation") {
    ScoreConfig cfg;
    cfg.ess = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.prior_prob = 0.5;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.prior_prob = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.max_parents = -1;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    CHECK_NOTHROW(cfg.validate());
}
