#include <doctest.h>

#include <algorithm>
#include <vector>

#include "ilscsl/constraints.hpp"
#include "ilscsl/errors.hpp"

using namespace ilscsl;

namespace {

// All subsets of candidates containing must_include, counted the slow way.
int subset_count(const std::vector<int>& must, const std::vector<int>& cand, int max_size) {
    int count = 0;
    const int k = static_cast<int>(cand.size());
    for (int mask = 0; mask < (1 << k); ++mask) {
        std::vector<int> s;
        for (int b = 0; b < k; ++b)
            if (mask & (1 << b)) s.push_back(cand[b]);
        if (static_cast<int>(s.size()) > max_size) continue;
        bool covers = true;
        for (int v : must) covers = covers && std::count(s.begin(), s.end(), v) > 0;
        if (covers) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("constraint set accepts, deduplicates, and rejects contradictions") {
    ConstraintSet cs(3);
    CHECK(cs.add({0, 1, Polarity::Required}).result == AddResult::Added);
    CHECK(cs.add({0, 1, Polarity::Required}).result == AddResult::Duplicate);
    CHECK(cs.size() == 1);

    // Same edge, opposite polarity.
    const AddOutcome conflict = cs.add({0, 1, Polarity::Forbidden});
    CHECK(conflict.result == AddResult::Conflict);
    CHECK_FALSE(conflict.reason.empty());

    // Pair required in both directions.
    CHECK(cs.add({1, 0, Polarity::Required}).result == AddResult::Conflict);

    // Required edges must stay acyclic: 0 -> 1 -> 2 -> 0 closes a cycle.
    CHECK(cs.add({1, 2, Polarity::Required}).result == AddResult::Added);
    CHECK(cs.add({2, 0, Polarity::Required}).result == AddResult::Conflict);

    // Rejections leave the set untouched.
    CHECK(cs.required() == std::set<Edge>{{0, 1}, {1, 2}});
    CHECK(cs.forbidden().empty());

    CHECK_THROWS_AS(cs.add({0, 0, Polarity::Forbidden}), InputError);
    CHECK_THROWS_AS(cs.add({0, 7, Polarity::Forbidden}), InputError);
}

TEST_CASE("forbidding both directions of a pair is consistent") {
    ConstraintSet cs(2);
    CHECK(cs.add({0, 1, Polarity::Forbidden}).result == AddResult::Added);
    CHECK(cs.add({1, 0, Polarity::Forbidden}).result == AddResult::Added);
    CHECK(cs.is_forbidden(0, 1));
    CHECK(cs.is_forbidden(1, 0));
}

TEST_CASE("provenance is recorded for accepted constraints only") {
    ConstraintSet cs(2);
    cs.add({0, 1, Polarity::Required}, {3, 'B', {1, 0}});
    const auto p = cs.provenance({0, 1, Polarity::Required});
    REQUIRE(p.has_value());
    CHECK(p->iteration == 3);
    CHECK(p->verdict == 'B');
    CHECK(p->queried_edge == Edge{1, 0});
    CHECK_FALSE(cs.provenance({1, 0, Polarity::Forbidden}).has_value());
}

TEST_CASE("parent bounds exclude forbidden parents and include required ones") {
    ConstraintSet cs(4);
    cs.add({0, 2, Polarity::Required});
    cs.add({1, 2, Polarity::Forbidden});
    cs.add({3, 0, Polarity::Forbidden});
    const ParentBounds b = derive_parent_bounds(cs);
    CHECK(b.candidates[2] == std::vector<int>{0, 3});
    CHECK(b.must_include[2] == std::vector<int>{0});
    CHECK(b.candidates[0] == std::vector<int>{1, 2});
    CHECK(b.must_include[0].empty());
    CHECK(b.candidate(2, 0));
    CHECK_FALSE(b.candidate(2, 1));
    CHECK(b.required(2, 0));
    CHECK_FALSE(b.required(2, 3));

    const ParentBounds u = unconstrained_bounds(3);
    CHECK(u.candidates[1] == std::vector<int>{0, 2});
    CHECK(u.must_include[1].empty());
}

TEST_CASE("parent set enumeration is size ordered, lex within size, and complete") {
    const auto sets = enumerate_parent_sets({1}, {1, 2, 4, 5}, 2);
    CHECK(sets == std::vector<std::vector<int>>{{1}, {1, 2}, {1, 4}, {1, 5}});

    for (int max_size : {0, 1, 2, 3, 4}) {
        const auto all = enumerate_parent_sets({}, {0, 2, 3, 5}, max_size);
        CHECK(static_cast<int>(all.size()) == subset_count({}, {0, 2, 3, 5}, max_size));
        for (std::size_t k = 1; k < all.size(); ++k) {
            const bool size_ordered = all[k - 1].size() < all[k].size() ||
                                      (all[k - 1].size() == all[k].size() && all[k - 1] < all[k]);
            CHECK(size_ordered);
        }
    }

    const auto with_must = enumerate_parent_sets({2, 3}, {1, 2, 3, 4}, 3);
    CHECK(static_cast<int>(with_must.size()) == subset_count({2, 3}, {1, 2, 3, 4}, 3));
    for (const auto& s : with_must) {
        CHECK(std::count(s.begin(), s.end(), 2) == 1);
        CHECK(std::count(s.begin(), s.end(), 3) == 1);
    }

    CHECK_THROWS_AS(enumerate_parent_sets({1, 2, 3}, {1, 2, 3, 4}, 2), InfeasibleError);
}

TEST_CASE("enumerate_local_space wires bounds through") {
    ConstraintSet cs(3);
    cs.add({0, 2, Polarity::Required});
    const auto sets = enumerate_local_space(2, derive_parent_bounds(cs), 2);
    CHECK(sets == std::vector<std::vector<int>>{{0}, {0, 1}});
}

TEST_CASE("satisfies checks required presence and forbidden absence") {
    ConstraintSet cs(3);
    cs.add({0, 1, Polarity::Required});
    cs.add({2, 1, Polarity::Forbidden});

    CHECK(satisfies(Dag::from_edges(3, {{0, 1}}), cs));
    CHECK(satisfies(Dag::from_edges(3, {{0, 1}, {0, 2}}), cs));
    CHECK_FALSE(satisfies(Dag(3), cs));                             // required missing
    CHECK_FALSE(satisfies(Dag::from_edges(3, {{0, 1}, {2, 1}}), cs));  // forbidden present
    CHECK_THROWS_AS(satisfies(Dag(2), cs), InputError);             // size mismatch
}

TEST_CASE("constraint text round trips and keeps provenance as comments") {
    ConstraintSet cs(4);
    cs.add({0, 2, Polarity::Required}, {1, 'B', {2, 0}});
    cs.add({3, 1, Polarity::Forbidden}, {0, 'C', {3, 1}});
    cs.add({1, 3, Polarity::Forbidden}, {0, 'C', {3, 1}});

    const std::string text = to_text(cs);
    CHECK(text.find("REQ 0 2") != std::string::npos);
    CHECK(text.find("FORBID 3 1") != std::string::npos);
    CHECK(text.find('#') != std::string::npos);  // provenance comment present

    const ConstraintSet back = constraint_set_from_text(4, text);
    CHECK(back == cs);

    CHECK_THROWS_AS(constraint_set_from_text(4, "REQUIRE 0 1\n"), ParseError);
    CHECK_THROWS_AS(constraint_set_from_text(4, "REQ 0\n"), ParseError);
    CHECK_THROWS_AS(constraint_set_from_text(2, "REQ 0 5\n"), InputError);
    // Text carrying a contradiction cannot build a set; the error names the line.
    CHECK_THROWS_AS(constraint_set_from_text(2, "REQ 0 1\nFORBID 0 1\n"), ParseError);
}
