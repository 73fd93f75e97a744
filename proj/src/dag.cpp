#include "ilscsl/dag.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "ilscsl/errors.hpp"

namespace ilscsl {

namespace {

void insert_sorted(std::vector<int>& v, int x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

bool erase_sorted(std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) return false;
    v.erase(it);
    return true;
}

}  // namespace

Dag::Dag(int n) : n_(n), parents_(n), children_(n) {
    if (n < 1) throw InputError("Dag: n must be >= 1, got " + std::to_string(n));
}

Dag Dag::from_edges(int n, const std::vector<Edge>& edges) {
    Dag g(n);
    for (const auto& [p, c] : edges) {
        g.check_node(p);
        g.check_node(c);
        if (p == c) throw InputError("Dag: self loop on " + std::to_string(p));
    }
    if (!is_acyclic(n, edges)) throw ConsistencyError("Dag: edge list contains a cycle");
    for (const auto& [p, c] : edges) {
        if (!g.has_edge(p, c)) {
            insert_sorted(g.parents_[c], p);
            insert_sorted(g.children_[p], c);
            ++g.edge_count_;
        }
    }
    return g;
}

void Dag::check_node(int v) const {
    if (v < 0 || v >= n_)
        throw InputError("Dag: node index " + std::to_string(v) + " out of range [0," +
                         std::to_string(n_) + ")");
}

bool Dag::has_edge(int parent, int child) const {
    check_node(parent);
    check_node(child);
    const auto& ps = parents_[child];
    return std::binary_search(ps.begin(), ps.end(), parent);
}

const std::vector<int>& Dag::parents(int child) const {
    check_node(child);
    return parents_[child];
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (int p = 0; p < n_; ++p)
        for (int c : children_[p]) out.emplace_back(p, c);
    return out;  // children_ rows are sorted, so this is (parent, child) order
}

bool Dag::add_edge(int parent, int child) {
    check_node(parent);
    check_node(child);
    if (parent == child) throw InputError("Dag: self loop on " + std::to_string(parent));
    if (has_edge(parent, child)) return false;
    // parent -> child closes a cycle exactly when child already reaches parent.
    if (reachable(child, parent)) return false;
    insert_sorted(parents_[child], parent);
    insert_sorted(children_[parent], child);
    ++edge_count_;
    return true;
}

bool Dag::remove_edge(int parent, int child) {
    check_node(parent);
    check_node(child);
    if (!erase_sorted(parents_[child], parent)) return false;
    erase_sorted(children_[parent], child);
    --edge_count_;
    return true;
}

bool Dag::reachable(int src, int dst) const {
    check_node(src);
    check_node(dst);
    if (src == dst) return true;
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{src};
    seen[src] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int c : children_[v]) {
            if (c == dst) return true;
            if (!seen[c]) {
                seen[c] = 1;
                stack.push_back(c);
            }
        }
    }
    return false;
}

std::vector<int> Dag::topological_order() const {
    // Kahn's algorithm with a min-heap so equal-depth ties come out ascending.
    std::vector<int> indeg(n_);
    for (int v = 0; v < n_; ++v) indeg[v] = static_cast<int>(parents_[v].size());
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < n_; ++v)
        if (indeg[v] == 0) ready.push(v);
    std::vector<int> order;
    order.reserve(n_);
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int c : children_[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    return order;  // always complete: the invariant keeps the graph acyclic
}

bool is_acyclic(int n, const std::vector<Edge>& edges) {
    if (n < 1) throw InputError("is_acyclic: n must be >= 1");
    std::vector<std::vector<int>> children(n);
    std::vector<int> indeg(n, 0);
    for (const auto& [p, c] : edges) {
        if (p < 0 || p >= n || c < 0 || c >= n)
            throw InputError("is_acyclic: edge index out of range");
        if (p == c) return false;
        children[p].push_back(c);
        ++indeg[c];
    }
    std::queue<int> ready;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push(v);
    int emitted = 0;
    while (!ready.empty()) {
        const int v = ready.front();
        ready.pop();
        ++emitted;
        for (int c : children[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    return emitted == n;
}

}  // namespace ilscsl
