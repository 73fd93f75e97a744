#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ilscsl/dag.hpp"

namespace ilscsl {

// Complete discrete dataset: m rows over n variables, value(r, i) in
// [0, cards[i]). Cardinalities are part of the object, not re-derived, so a
// value that never occurs in the sample still counts as a level.
class DiscreteDataset {
public:
    DiscreteDataset(std::vector<int> cards, std::vector<int> values_row_major);

    int m() const { return m_; }
    int n() const { return n_; }
    int card(int i) const { return cards_[i]; }
    const std::vector<int>& cards() const { return cards_; }

    int value(int row, int var) const { return values_[static_cast<std::size_t>(row) * n_ + var]; }

private:
    int m_;
    int n_;
    std::vector<int> cards_;
    std::vector<int> values_;  // row-major
};

// Sufficient statistics for one (child, parent set) pair. Parent
// configurations are indexed in mixed-radix order over the parents sorted
// ascending, first parent most significant: config advancing by one steps the
// last parent's value first.
class CountTable {
public:
    CountTable(const DiscreteDataset& d, int child, std::vector<int> parents);

    const std::vector<int>& parents() const { return parents_; }
    std::int64_t config_count() const { return q_; }
    int child_card() const { return r_; }

    std::uint32_t at(std::int64_t config, int child_value) const;

    // N_j for one configuration (sum over child values).
    std::int64_t config_total(std::int64_t config) const;

    // Calls fn(config, row) for every configuration with at least one
    // observation, in ascending config order. row has child_card entries.
    template <typename Fn>
    void for_each_nonzero(Fn&& fn) const {
        if (dense_) {
            std::vector<std::uint32_t> row(r_);
            for (std::int64_t j = 0; j < q_; ++j) {
                bool any = false;
                for (int k = 0; k < r_; ++k) {
                    row[k] = dense_counts_[static_cast<std::size_t>(j) * r_ + k];
                    any = any || row[k] != 0;
                }
                if (any) fn(j, row);
            }
        } else {
            for (const auto& [j, row] : sparse_counts_) fn(j, row);
        }
    }

    // The full table as a map keyed by (config, child value); zero cells
    // omitted. Intended for tests and small tables.
    std::map<std::pair<std::int64_t, int>, std::uint32_t> as_map() const;

private:
    std::vector<int> parents_;
    std::vector<std::int64_t> strides_;
    std::int64_t q_;
    int r_;
    bool dense_;
    std::vector<std::uint32_t> dense_counts_;                       // q * r when dense
    std::map<std::int64_t, std::vector<std::uint32_t>> sparse_counts_;  // otherwise
};

// Convenience wrapper matching the functional style used by the scorer.
CountTable counts(const DiscreteDataset& d, int child, const std::vector<int>& parents);

// One conditional probability table. Rows are indexed like CountTable
// configurations (parents ascending, mixed-radix, first parent most
// significant); each row holds P(child = k | config) and sums to one.
struct Cpt {
    std::vector<double> probs;  // q * card(child), row-major
};

// A ground-truth Bayesian network: structure, cardinalities, CPTs, and the
// naming metadata needed to phrase questions about its variables.
class GroundTruthNetwork {
public:
    GroundTruthNetwork(Dag dag, std::vector<int> cards, std::vector<Cpt> cpts,
                       std::vector<std::string> names,
                       std::vector<std::vector<std::string>> state_labels,
                       std::string field_text = {},
                       std::vector<std::string> descriptions = {});

    const Dag& dag() const { return dag_; }
    int n() const { return dag_.n(); }
    int card(int i) const { return cards_[i]; }
    const std::vector<int>& cards() const { return cards_; }
    const Cpt& cpt(int i) const { return cpts_[i]; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::vector<std::string>>& state_labels() const { return state_labels_; }

    // Domain text for prompts. Description falls back to the variable name
    // when none was provided.
    const std::string& field_text() const { return field_text_; }
    std::string description(int i) const;

    int index_of(const std::string& name) const;  // throws InputError if unknown

    double row_prob(int node, std::int64_t config, int value) const;

private:
    Dag dag_;
    std::vector<int> cards_;
    std::vector<Cpt> cpts_;
    std::vector<std::string> names_;
    std::vector<std::vector<std::string>> state_labels_;
    std::string field_text_;
    std::vector<std::string> descriptions_;
};

// Ancestral sampling: nodes are visited in topological order and each value
// drawn from its CPT row given the already-sampled parents. Bit-exact
// reproducible for a given (network, m, seed).
DiscreteDataset forward_sample(const GroundTruthNetwork& net, int m, std::uint64_t seed);

// CSV with a header of variable names, comma-delimited integer cells, no
// quoting. Cardinalities are max+1 per column unless the caller supplies
// overrides (e.g. from a sidecar file).
struct LoadedData {
    DiscreteDataset data;
    std::vector<std::string> names;
};

LoadedData load_csv(const std::string& text,
                    const std::map<std::string, int>& card_overrides = {});
LoadedData load_csv_file(const std::string& path,
                         const std::map<std::string, int>& card_overrides = {});

std::string to_csv(const DiscreteDataset& d, const std::vector<std::string>& names);

// Sidecar format: one "name card" pair per line, '#' comments allowed.
std::map<std::string, int> parse_cardinality_sidecar(const std::string& text);
std::string to_cardinality_sidecar(const std::vector<std::string>& names,
                                   const std::vector<int>& cards);

}  // namespace ilscsl
