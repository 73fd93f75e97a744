#include "ilscsl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ilscsl/errors.hpp"
#include "ilscsl/util.hpp"

namespace ilscsl {

namespace {

constexpr std::int64_t kMaxConfigs = std::int64_t{1} << 32;
constexpr std::int64_t kDenseCellLimit = std::int64_t{1} << 22;

}  // namespace

DiscreteDataset::DiscreteDataset(std::vector<int> cards, std::vector<int> values_row_major)
    : cards_(std::move(cards)), values_(std::move(values_row_major)) {
    n_ = static_cast<int>(cards_.size());
    if (n_ < 1) throw InputError("DiscreteDataset: need at least one variable");
    for (int i = 0; i < n_; ++i)
        if (cards_[i] < 2)
            throw InputError("DiscreteDataset: cards[" + std::to_string(i) +
                             "] = " + std::to_string(cards_[i]) + ", must be >= 2");
    if (values_.empty() || values_.size() % n_ != 0)
        throw InputError("DiscreteDataset: value buffer size " + std::to_string(values_.size()) +
                         " is not a positive multiple of n = " + std::to_string(n_));
    m_ = static_cast<int>(values_.size() / n_);
    for (int r = 0; r < m_; ++r)
        for (int i = 0; i < n_; ++i) {
            const int v = value(r, i);
            if (v < 0 || v >= cards_[i])
                throw InputError("DiscreteDataset: cell (" + std::to_string(r) + "," +
                                 std::to_string(i) + ") = " + std::to_string(v) +
                                 " outside [0," + std::to_string(cards_[i]) + ")");
        }
}

CountTable::CountTable(const DiscreteDataset& d, int child, std::vector<int> parents)
    : parents_(std::move(parents)) {
    if (child < 0 || child >= d.n())
        throw InputError("counts: child index out of range");
    std::sort(parents_.begin(), parents_.end());
    if (!sorted_unique(parents_))
        throw InputError("counts: duplicate parent");
    for (int p : parents_) {
        if (p < 0 || p >= d.n()) throw InputError("counts: parent index out of range");
        if (p == child) throw InputError("counts: child cannot be its own parent");
    }
    r_ = d.card(child);

    // Strides for mixed-radix config indexing, first parent most significant.
    const int k = static_cast<int>(parents_.size());
    strides_.assign(k, 1);
    q_ = 1;
    for (int t = k - 1; t >= 0; --t) {
        strides_[t] = q_;
        q_ *= d.card(parents_[t]);
        if (q_ > kMaxConfigs)
            throw CapacityError("counts: parent configuration count exceeds 2^32");
    }

    dense_ = q_ * r_ <= kDenseCellLimit;
    if (dense_) dense_counts_.assign(static_cast<std::size_t>(q_) * r_, 0);

    for (int row = 0; row < d.m(); ++row) {
        std::int64_t cfg = 0;
        for (int t = 0; t < k; ++t) cfg += strides_[t] * d.value(row, parents_[t]);
        const int v = d.value(row, child);
        if (dense_) {
            ++dense_counts_[static_cast<std::size_t>(cfg) * r_ + v];
        } else {
            auto& slot = sparse_counts_[cfg];
            if (slot.empty()) slot.assign(r_, 0);
            ++slot[v];
        }
    }
}

std::uint32_t CountTable::at(std::int64_t config, int child_value) const {
    if (config < 0 || config >= q_ || child_value < 0 || child_value >= r_)
        throw InputError("CountTable::at: index out of range");
    if (dense_) return dense_counts_[static_cast<std::size_t>(config) * r_ + child_value];
    auto it = sparse_counts_.find(config);
    return it == sparse_counts_.end() ? 0 : it->second[child_value];
}

std::int64_t CountTable::config_total(std::int64_t config) const {
    std::int64_t total = 0;
    for (int v = 0; v < r_; ++v) total += at(config, v);
    return total;
}

std::map<std::pair<std::int64_t, int>, std::uint32_t> CountTable::as_map() const {
    std::map<std::pair<std::int64_t, int>, std::uint32_t> out;
    for_each_nonzero([&](std::int64_t cfg, const std::vector<std::uint32_t>& row) {
        for (int v = 0; v < r_; ++v)
            if (row[v] != 0) out[{cfg, v}] = row[v];
    });
    return out;
}

CountTable counts(const DiscreteDataset& d, int child, const std::vector<int>& parents) {
    return CountTable(d, child, parents);
}

GroundTruthNetwork::GroundTruthNetwork(Dag dag, std::vector<int> cards, std::vector<Cpt> cpts,
                                       std::vector<std::string> names,
                                       std::vector<std::vector<std::string>> state_labels,
                                       std::string field_text,
                                       std::vector<std::string> descriptions)
    : dag_(std::move(dag)),
      cards_(std::move(cards)),
      cpts_(std::move(cpts)),
      names_(std::move(names)),
      state_labels_(std::move(state_labels)),
      field_text_(std::move(field_text)),
      descriptions_(std::move(descriptions)) {
    const int n = dag_.n();
    if (static_cast<int>(cards_.size()) != n || static_cast<int>(cpts_.size()) != n ||
        static_cast<int>(names_.size()) != n || static_cast<int>(state_labels_.size()) != n)
        throw InputError("GroundTruthNetwork: field sizes disagree with node count");
    if (!descriptions_.empty() && static_cast<int>(descriptions_.size()) != n)
        throw InputError("GroundTruthNetwork: descriptions must be empty or per-variable");
    for (int i = 0; i < n; ++i) {
        if (cards_[i] < 2) throw InputError("GroundTruthNetwork: cards must be >= 2");
        if (static_cast<int>(state_labels_[i].size()) != cards_[i])
            throw InputError("GroundTruthNetwork: state label count mismatch for " + names_[i]);
        std::int64_t q = 1;
        for (int p : dag_.parents(i)) q *= cards_[p];
        if (static_cast<std::int64_t>(cpts_[i].probs.size()) != q * cards_[i])
            throw InputError("GroundTruthNetwork: CPT size mismatch for " + names_[i]);
        for (std::int64_t j = 0; j < q; ++j) {
            double sum = 0.0;
            for (int v = 0; v < cards_[i]; ++v) {
                const double pr = cpts_[i].probs[static_cast<std::size_t>(j) * cards_[i] + v];
                if (pr < 0.0 || pr > 1.0)
                    throw ConsistencyError("GroundTruthNetwork: probability out of [0,1] for " +
                                           names_[i]);
                sum += pr;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw ConsistencyError("GroundTruthNetwork: CPT row of " + names_[i] +
                                       " sums to " + std::to_string(sum));
        }
    }
}

std::string GroundTruthNetwork::description(int i) const {
    if (!descriptions_.empty() && !descriptions_[i].empty()) return descriptions_[i];
    return names_[i];
}

int GroundTruthNetwork::index_of(const std::string& name) const {
    for (int i = 0; i < n(); ++i)
        if (names_[i] == name) return i;
    throw InputError("GroundTruthNetwork: unknown variable name: " + name);
}

double GroundTruthNetwork::row_prob(int node, std::int64_t config, int value) const {
    return cpts_[node].probs[static_cast<std::size_t>(config) * cards_[node] + value];
}

DiscreteDataset forward_sample(const GroundTruthNetwork& net, int m, std::uint64_t seed) {
    if (m < 1) throw InputError("forward_sample: m must be >= 1");
    const int n = net.n();
    const std::vector<int> order = net.dag().topological_order();

    // Per-node strides into its CPT, aligned with parents ascending.
    std::vector<std::vector<std::int64_t>> strides(n);
    for (int i = 0; i < n; ++i) {
        const auto& ps = net.dag().parents(i);
        strides[i].assign(ps.size(), 1);
        std::int64_t q = 1;
        for (int t = static_cast<int>(ps.size()) - 1; t >= 0; --t) {
            strides[i][t] = q;
            q *= net.card(ps[t]);
        }
    }

    std::mt19937_64 rng(seed);
    std::vector<int> values(static_cast<std::size_t>(m) * n);
    std::vector<int> row(n);
    for (int r = 0; r < m; ++r) {
        for (int i : order) {
            const auto& ps = net.dag().parents(i);
            std::int64_t cfg = 0;
            for (std::size_t t = 0; t < ps.size(); ++t) cfg += strides[i][t] * row[ps[t]];
            const double u = uniform01(rng);
            double acc = 0.0;
            int v = net.card(i) - 1;  // fallback guards against rounding at 1.0
            for (int k = 0; k < net.card(i); ++k) {
                acc += net.row_prob(i, cfg, k);
                if (u < acc) {
                    v = k;
                    break;
                }
            }
            row[i] = v;
        }
        for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(r) * n + i] = row[i];
    }
    return DiscreteDataset(net.cards(), std::move(values));
}

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

LoadedData load_csv(const std::string& text, const std::map<std::string, int>& card_overrides) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input, expected a header line", 1);
    std::vector<std::string> names;
    for (auto& name : split(line, ',')) {
        const std::string s = strip(name);
        if (s.empty()) throw ParseError("empty variable name in header", 1);
        if (std::find(names.begin(), names.end(), s) != names.end())
            throw ParseError("duplicate variable name '" + s + "' in header", 1);
        names.push_back(s);
    }
    const int n = static_cast<int>(names.size());
    for (const auto& [name, card] : card_overrides) {
        if (std::find(names.begin(), names.end(), name) == names.end())
            throw InputError("cardinality override names unknown variable: " + name);
        if (card < 2) throw InputError("cardinality override for " + name + " must be >= 2");
    }

    std::vector<int> values;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        const auto cells = split(line, ',');
        if (static_cast<int>(cells.size()) != n)
            throw ParseError("expected " + std::to_string(n) + " cells, found " +
                             std::to_string(cells.size()), lineno);
        for (int i = 0; i < n; ++i) {
            const std::string cell = strip(cells[i]);
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(cell, &used);
            } catch (const std::exception&) {
                throw ParseError("non-integer cell '" + cell + "'", lineno, i + 1);
            }
            if (used != cell.size() || v < 0)
                throw ParseError("non-integer cell '" + cell + "'", lineno, i + 1);
            if (auto it = card_overrides.find(names[i]);
                it != card_overrides.end() && v >= it->second)
                throw ParseError("value " + std::to_string(v) + " outside declared range of " +
                                     names[i],
                                 lineno, i + 1);
            values.push_back(v);
        }
    }
    if (values.empty()) throw ParseError("no data rows", lineno);

    const int m = static_cast<int>(values.size()) / n;
    std::vector<int> cards(n, 0);
    for (int r = 0; r < m; ++r)
        for (int i = 0; i < n; ++i)
            cards[i] = std::max(cards[i], values[static_cast<std::size_t>(r) * n + i] + 1);
    for (int i = 0; i < n; ++i)
        if (auto it = card_overrides.find(names[i]); it != card_overrides.end())
            cards[i] = it->second;
    return LoadedData{DiscreteDataset(std::move(cards), std::move(values)), std::move(names)};
}

LoadedData load_csv_file(const std::string& path,
                         const std::map<std::string, int>& card_overrides) {
    return load_csv(read_file(path), card_overrides);
}

std::string to_csv(const DiscreteDataset& d, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != d.n())
        throw InputError("to_csv: name count mismatch");
    std::ostringstream out;
    for (int i = 0; i < d.n(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    for (int r = 0; r < d.m(); ++r) {
        for (int i = 0; i < d.n(); ++i) out << (i ? "," : "") << d.value(r, i);
        out << '\n';
    }
    return out.str();
}

std::map<std::string, int> parse_cardinality_sidecar(const std::string& text) {
    std::map<std::string, int> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        std::istringstream ls(s);
        std::string name;
        int card = 0;
        if (!(ls >> name >> card) || !(ls >> std::ws).eof())
            throw ParseError("expected 'name card'", lineno);
        if (out.count(name)) throw ParseError("duplicate variable '" + name + "'", lineno);
        out[name] = card;
    }
    return out;
}

std::string to_cardinality_sidecar(const std::vector<std::string>& names,
                                   const std::vector<int>& cards) {
    if (names.size() != cards.size()) throw InputError("sidecar: size mismatch");
    std::ostringstream out;
    for (std::size_t i = 0; i < names.size(); ++i) out << names[i] << ' ' << cards[i] << '\n';
    return out.str();
}

}  // namespace ilscsl
